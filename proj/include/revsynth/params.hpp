#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "revsynth/autodiff.hpp"
#include "revsynth/rng.hpp"

namespace revsynth {

struct AdamConfig {
    double lr = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Named trainable tensors plus Adam moments. Iteration order is the sorted
// name order, so updates are deterministic.
class ParamStore {
public:
    // Creates a tensor initialized uniformly in [-init_range, init_range].
    Var create(const std::string& name, std::vector<std::size_t> shape, Rng& rng,
               double init_range = 0.08);
    Var create_zeros(const std::string& name, std::vector<std::size_t> shape);

    Var get(const std::string& name) const;
    bool has(const std::string& name) const { return params_.count(name) > 0; }
    const std::map<std::string, Var>& all() const { return params_; }
    std::size_t total_size() const;

    void zero_grads();

    // Global L2 norm of all gradients; scales them down to max_norm when the
    // norm exceeds it. Returns the pre-clip norm.
    double clip_gradients(double max_norm);

    // Bias-corrected Adam update over every parameter; zeroes gradients
    // afterward. Throws numeric_error if any gradient is non-finite.
    void adam_step(const AdamConfig& cfg);

    std::uint64_t step_count() const { return step_; }

    // Versioned checkpoint: named tensors, Adam moments, step counter and a
    // free-form config text, all little-endian 64-bit floats.
    void save(const std::string& path, const std::string& config_text) const;
    static std::pair<ParamStore, std::string> load(const std::string& path);

private:
    struct Moments {
        Tensor m;
        Tensor v;
    };
    std::map<std::string, Var> params_;
    std::map<std::string, Moments> moments_;
    std::uint64_t step_ = 0;
};

} // namespace revsynth
