#include "revsynth/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "revsynth/errors.hpp"

namespace revsynth {

namespace {

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        double out = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return out;
    } catch (const std::exception&) {
        throw data_error("config key " + key + " has a malformed number: " + value);
    }
}

std::uint64_t parse_uint(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        unsigned long long out = std::stoull(value, &used);
        if (used != value.size() || (!value.empty() && value[0] == '-')) {
            throw std::invalid_argument(value);
        }
        return out;
    } catch (const std::exception&) {
        throw data_error("config key " + key + " has a malformed integer: " + value);
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "0" || value == "false") return false;
    if (value == "1" || value == "true") return true;
    throw data_error("config key " + key + " must be 0/1/true/false, got " + value);
}

std::string trim(const std::string& s) {
    std::size_t start = s.find_first_not_of(" \t\r");
    if (start == std::string::npos) return "";
    std::size_t end = s.find_last_not_of(" \t\r");
    return s.substr(start, end - start + 1);
}

} // namespace

PipelineConfig config_from_text(const std::string& text) {
    PipelineConfig cfg;
    using Setter = std::function<void(const std::string&, const std::string&)>;
    const std::map<std::string, Setter> setters = {
        {"d", [&](const std::string& k, const std::string& v) {
             cfg.model.d = static_cast<std::size_t>(parse_uint(k, v));
         }},
        {"embed_dim", [&](const std::string& k, const std::string& v) {
             cfg.model.embed_dim = static_cast<std::size_t>(parse_uint(k, v));
         }},
        {"layers", [&](const std::string& k, const std::string& v) {
             cfg.model.layers = static_cast<std::size_t>(parse_uint(k, v));
         }},
        {"dropout", [&](const std::string& k, const std::string& v) {
             cfg.model.dropout = parse_double(k, v);
         }},
        {"fusion_mode", [&](const std::string& k, const std::string& v) {
             (void)k;
             cfg.model.fusion_mode = fusion_mode_from_string(v);
         }},
        {"batch_size", [&](const std::string& k, const std::string& v) {
             cfg.trainer.batch_size = static_cast<std::size_t>(parse_uint(k, v));
         }},
        {"epochs", [&](const std::string& k, const std::string& v) {
             cfg.trainer.epochs = static_cast<std::size_t>(parse_uint(k, v));
         }},
        {"lr", [&](const std::string& k, const std::string& v) {
             cfg.trainer.lr = parse_double(k, v);
         }},
        {"tf_probability", [&](const std::string& k, const std::string& v) {
             cfg.trainer.tf_probability = parse_double(k, v);
         }},
        {"clip_norm", [&](const std::string& k, const std::string& v) {
             cfg.trainer.clip_norm = parse_double(k, v);
         }},
        {"vocab_cap", [&](const std::string& k, const std::string& v) {
             cfg.vocab_cap = static_cast<int>(parse_uint(k, v));
         }},
        {"review_limit", [&](const std::string& k, const std::string& v) {
             cfg.limits.review = static_cast<int>(parse_uint(k, v));
         }},
        {"snippet_limit", [&](const std::string& k, const std::string& v) {
             cfg.limits.snippet = static_cast<int>(parse_uint(k, v));
         }},
        {"category_limit", [&](const std::string& k, const std::string& v) {
             cfg.limits.category = static_cast<int>(parse_uint(k, v));
         }},
        {"response_limit", [&](const std::string& k, const std::string& v) {
             cfg.limits.response = static_cast<int>(parse_uint(k, v));
         }},
        {"train_ratio", [&](const std::string& k, const std::string& v) {
             cfg.split_ratios[0] = parse_double(k, v);
         }},
        {"valid_ratio", [&](const std::string& k, const std::string& v) {
             cfg.split_ratios[1] = parse_double(k, v);
         }},
        {"test_ratio", [&](const std::string& k, const std::string& v) {
             cfg.split_ratios[2] = parse_double(k, v);
         }},
        {"bm25_k1", [&](const std::string& k, const std::string& v) {
             cfg.bm25.k1 = parse_double(k, v);
         }},
        {"bm25_b", [&](const std::string& k, const std::string& v) {
             cfg.bm25.b = parse_double(k, v);
         }},
        {"review_snippets", [&](const std::string& k, const std::string& v) {
             cfg.review_snippets = static_cast<std::size_t>(parse_uint(k, v));
         }},
        {"beam", [&](const std::string& k, const std::string& v) {
             cfg.beam_width = static_cast<std::size_t>(parse_uint(k, v));
         }},
        {"eval_workers", [&](const std::string& k, const std::string& v) {
             cfg.eval_workers = static_cast<std::size_t>(parse_uint(k, v));
         }},
        {"sentence_bleu", [&](const std::string& k, const std::string& v) {
             cfg.sentence_bleu = parse_bool(k, v);
         }},
        {"seed", [&](const std::string& k, const std::string& v) {
             cfg.seed = parse_uint(k, v);
             cfg.trainer.seed = cfg.seed;
         }},
    };

    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string trimmed = trim(line);
        if (trimmed.empty() || trimmed[0] == '#') continue;
        std::size_t eq = trimmed.find('=');
        if (eq == std::string::npos) {
            throw data_error("config line " + std::to_string(line_no) + " is not key=value: " +
                             trimmed);
        }
        std::string key = trim(trimmed.substr(0, eq));
        std::string value = trim(trimmed.substr(eq + 1));
        auto it = setters.find(key);
        if (it == setters.end()) throw data_error("unknown config key: " + key);
        it->second(key, value);
    }
    return cfg;
}

std::string config_to_text(const PipelineConfig& cfg) {
    std::ostringstream out;
    out << "d=" << cfg.model.d << "\n";
    out << "embed_dim=" << cfg.model.embed_dim << "\n";
    out << "layers=" << cfg.model.layers << "\n";
    out << "dropout=" << cfg.model.dropout << "\n";
    out << "fusion_mode=" << fusion_mode_to_string(cfg.model.fusion_mode) << "\n";
    out << "batch_size=" << cfg.trainer.batch_size << "\n";
    out << "epochs=" << cfg.trainer.epochs << "\n";
    out << "lr=" << cfg.trainer.lr << "\n";
    out << "tf_probability=" << cfg.trainer.tf_probability << "\n";
    out << "clip_norm=" << cfg.trainer.clip_norm << "\n";
    out << "vocab_cap=" << cfg.vocab_cap << "\n";
    out << "review_limit=" << cfg.limits.review << "\n";
    out << "snippet_limit=" << cfg.limits.snippet << "\n";
    out << "category_limit=" << cfg.limits.category << "\n";
    out << "response_limit=" << cfg.limits.response << "\n";
    out << "train_ratio=" << cfg.split_ratios[0] << "\n";
    out << "valid_ratio=" << cfg.split_ratios[1] << "\n";
    out << "test_ratio=" << cfg.split_ratios[2] << "\n";
    out << "bm25_k1=" << cfg.bm25.k1 << "\n";
    out << "bm25_b=" << cfg.bm25.b << "\n";
    out << "review_snippets=" << cfg.review_snippets << "\n";
    out << "beam=" << cfg.beam_width << "\n";
    out << "eval_workers=" << cfg.eval_workers << "\n";
    out << "sentence_bleu=" << (cfg.sentence_bleu ? 1 : 0) << "\n";
    out << "seed=" << cfg.seed << "\n";
    return out.str();
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open config file " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return config_from_text(buffer.str());
}

} // namespace revsynth
