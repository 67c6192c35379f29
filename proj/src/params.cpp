#include "revsynth/params.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "revsynth/errors.hpp"

namespace revsynth {

namespace {

constexpr char kMagic[8] = {'R', 'S', 'C', 'K', 'P', '0', '0', '1'};

void write_u64(std::ostream& out, std::uint64_t v) {
    char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    out.write(buf, 8);
}

std::uint64_t read_u64(std::istream& in) {
    unsigned char buf[8];
    in.read(reinterpret_cast<char*>(buf), 8);
    if (!in) throw data_error("truncated checkpoint");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
}

void write_str(std::ostream& out, const std::string& s) {
    write_u64(out, s.size());
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_str(std::istream& in) {
    std::uint64_t len = read_u64(in);
    std::string s(len, '\0');
    in.read(s.data(), static_cast<std::streamsize>(len));
    if (!in) throw data_error("truncated checkpoint");
    return s;
}

void write_tensor(std::ostream& out, const Tensor& t) {
    write_u64(out, t.shape.size());
    for (std::size_t dim : t.shape) write_u64(out, dim);
    for (double v : t.data) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        write_u64(out, bits);
    }
}

Tensor read_tensor(std::istream& in) {
    std::uint64_t rank = read_u64(in);
    std::vector<std::size_t> shape;
    for (std::uint64_t i = 0; i < rank; ++i) shape.push_back(read_u64(in));
    Tensor t(shape);
    for (double& v : t.data) {
        std::uint64_t bits = read_u64(in);
        std::memcpy(&v, &bits, 8);
    }
    return t;
}

} // namespace

Var ParamStore::create(const std::string& name, std::vector<std::size_t> shape, Rng& rng,
                       double init_range) {
    if (params_.count(name)) throw data_error("duplicate parameter " + name);
    Tensor t(std::move(shape));
    for (double& v : t.data) v = rng.uniform(-init_range, init_range);
    Var var = make_leaf(std::move(t));
    params_[name] = var;
    moments_[name] = Moments{Tensor(var->value.shape), Tensor(var->value.shape)};
    return var;
}

Var ParamStore::create_zeros(const std::string& name, std::vector<std::size_t> shape) {
    if (params_.count(name)) throw data_error("duplicate parameter " + name);
    Var var = make_leaf(Tensor(std::move(shape)));
    params_[name] = var;
    moments_[name] = Moments{Tensor(var->value.shape), Tensor(var->value.shape)};
    return var;
}

Var ParamStore::get(const std::string& name) const {
    auto it = params_.find(name);
    if (it == params_.end()) throw data_error("unknown parameter " + name);
    return it->second;
}

std::size_t ParamStore::total_size() const {
    std::size_t n = 0;
    for (const auto& [name, var] : params_) n += var->value.size();
    return n;
}

void ParamStore::zero_grads() {
    for (auto& [name, var] : params_) var->zero_grad();
}

double ParamStore::clip_gradients(double max_norm) {
    double sq = 0.0;
    for (const auto& [name, var] : params_) {
        if (var->grad.data.empty()) continue;
        for (double g : var->grad.data) sq += g * g;
    }
    double norm = std::sqrt(sq);
    if (norm > max_norm && norm > 0.0) {
        double factor = max_norm / norm;
        for (auto& [name, var] : params_) {
            for (double& g : var->grad.data) g *= factor;
        }
    }
    return norm;
}

void ParamStore::adam_step(const AdamConfig& cfg) {
    ++step_;
    double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step_));
    double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step_));
    for (auto& [name, var] : params_) {
        Moments& mom = moments_[name];
        Tensor& grad = var->ensure_grad();
        for (std::size_t i = 0; i < grad.size(); ++i) {
            double g = grad.data[i];
            if (!std::isfinite(g)) {
                throw numeric_error("non-finite gradient in parameter " + name);
            }
            double m = cfg.beta1 * mom.m.data[i] + (1.0 - cfg.beta1) * g;
            double v = cfg.beta2 * mom.v.data[i] + (1.0 - cfg.beta2) * g * g;
            mom.m.data[i] = m;
            mom.v.data[i] = v;
            double m_hat = m / bc1;
            double v_hat = v / bc2;
            var->value.data[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
        }
    }
    zero_grads();
}

void ParamStore::save(const std::string& path, const std::string& config_text) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw data_error("cannot open " + path + " for writing");
    out.write(kMagic, sizeof(kMagic));
    write_str(out, config_text);
    write_u64(out, step_);
    write_u64(out, params_.size());
    for (const auto& [name, var] : params_) {
        write_str(out, name);
        write_tensor(out, var->value);
        const Moments& mom = moments_.at(name);
        write_tensor(out, mom.m);
        write_tensor(out, mom.v);
    }
    if (!out) throw data_error("failed writing " + path);
}

std::pair<ParamStore, std::string> ParamStore::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(magic)) != 0) {
        throw data_error("not a checkpoint file (bad magic)");
    }
    std::string config_text = read_str(in);
    ParamStore store;
    store.step_ = read_u64(in);
    std::uint64_t count = read_u64(in);
    for (std::uint64_t i = 0; i < count; ++i) {
        std::string name = read_str(in);
        Tensor value = read_tensor(in);
        Tensor m = read_tensor(in);
        Tensor v = read_tensor(in);
        if (!m.same_shape(value) || !v.same_shape(value)) {
            throw data_error("checkpoint moments do not match parameter " + name);
        }
        store.params_[name] = make_leaf(std::move(value));
        store.moments_[name] = Moments{std::move(m), std::move(v)};
    }
    return {std::move(store), std::move(config_text)};
}

} // namespace revsynth
