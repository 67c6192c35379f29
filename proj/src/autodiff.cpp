#include "revsynth/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "revsynth/errors.hpp"

namespace revsynth {

namespace {
thread_local bool g_grad_enabled = true;

void check_vector(const Var& v, const char* what) {
    if (v->value.rank() != 1) throw std::logic_error(std::string(what) + ": expected a vector");
}
} // namespace

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }
bool grad_enabled() { return g_grad_enabled; }

void Node::accum(std::size_t parent_idx, const Tensor& g) {
    Node& p = *parents[parent_idx];
    if (!p.requires_grad) return;
    Tensor& pg = p.ensure_grad();
    for (std::size_t i = 0; i < g.data.size(); ++i) pg.data[i] += g.data[i];
}

Var make_var(Tensor value, bool requires_grad) {
    auto node = std::make_shared<Node>();
    node->value = std::move(value);
    node->requires_grad = requires_grad && g_grad_enabled;
    return node;
}

Var make_leaf(Tensor value) {
    auto node = std::make_shared<Node>();
    node->value = std::move(value);
    node->requires_grad = true;
    return node;
}

namespace {

// Builds a node whose closure runs only when gradients are being recorded
// and at least one parent participates.
Var make_op(Tensor value, std::vector<Var> parents, std::function<void(Node&)> backprop) {
    auto node = std::make_shared<Node>();
    node->value = std::move(value);
    bool any = false;
    if (g_grad_enabled) {
        for (const auto& p : parents) {
            if (p->requires_grad) { any = true; break; }
        }
    }
    if (any) {
        node->requires_grad = true;
        node->parents = std::move(parents);
        node->backprop = std::move(backprop);
    }
    return node;
}

} // namespace

void backward(const Var& loss, double seed_scale) {
    if (loss->value.size() != 1) throw std::logic_error("backward: loss must be scalar");
    if (!loss->requires_grad) return;

    // Iterative DFS topological sort over requires_grad nodes.
    std::vector<Node*> order;
    std::unordered_set<Node*> visited;
    std::vector<std::pair<Node*, std::size_t>> stack;
    stack.emplace_back(loss.get(), 0);
    visited.insert(loss.get());
    while (!stack.empty()) {
        auto& [node, next_child] = stack.back();
        if (next_child < node->parents.size()) {
            Node* child = node->parents[next_child].get();
            ++next_child;
            if (child->requires_grad && !child->backprop && child->parents.empty()) {
                // leaf: no closure to schedule, grads accumulate directly
                continue;
            }
            if (child->requires_grad && visited.insert(child).second) {
                stack.emplace_back(child, 0);
            }
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }

    loss->ensure_grad().data[0] += seed_scale;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Node* node = *it;
        if (node->backprop) node->backprop(*node);
    }
    // Sever the graph so shared_ptr teardown cannot recurse; intermediate
    // grads go with it, leaf grads stay.
    for (Node* node : order) {
        node->parents.clear();
        node->backprop = nullptr;
        if (node != loss.get()) node->grad = Tensor();
    }
}

Var add(const Var& a, const Var& b) {
    if (!a->value.same_shape(b->value)) throw std::logic_error("add: shape mismatch");
    Tensor out = a->value;
    for (std::size_t i = 0; i < out.size(); ++i) out.data[i] += b->value.data[i];
    return make_op(std::move(out), {a, b}, [](Node& self) {
        self.accum(0, self.grad);
        self.accum(1, self.grad);
    });
}

Var sub(const Var& a, const Var& b) {
    if (!a->value.same_shape(b->value)) throw std::logic_error("sub: shape mismatch");
    Tensor out = a->value;
    for (std::size_t i = 0; i < out.size(); ++i) out.data[i] -= b->value.data[i];
    return make_op(std::move(out), {a, b}, [](Node& self) {
        self.accum(0, self.grad);
        if (self.parents[1]->requires_grad) {
            Tensor neg = self.grad;
            for (double& g : neg.data) g = -g;
            self.accum(1, neg);
        }
    });
}

Var mul(const Var& a, const Var& b) {
    if (!a->value.same_shape(b->value)) throw std::logic_error("mul: shape mismatch");
    Tensor out = a->value;
    for (std::size_t i = 0; i < out.size(); ++i) out.data[i] *= b->value.data[i];
    return make_op(std::move(out), {a, b}, [](Node& self) {
        if (self.parents[0]->requires_grad) {
            Tensor ga = self.grad;
            const Tensor& bv = self.parents[1]->value;
            for (std::size_t i = 0; i < ga.size(); ++i) ga.data[i] *= bv.data[i];
            self.accum(0, ga);
        }
        if (self.parents[1]->requires_grad) {
            Tensor gb = self.grad;
            const Tensor& av = self.parents[0]->value;
            for (std::size_t i = 0; i < gb.size(); ++i) gb.data[i] *= av.data[i];
            self.accum(1, gb);
        }
    });
}

Var add_n(const std::vector<Var>& terms) {
    if (terms.empty()) throw std::logic_error("add_n: no terms");
    Tensor out = terms[0]->value;
    for (std::size_t t = 1; t < terms.size(); ++t) {
        if (!terms[t]->value.same_shape(out)) throw std::logic_error("add_n: shape mismatch");
        for (std::size_t i = 0; i < out.size(); ++i) out.data[i] += terms[t]->value.data[i];
    }
    return make_op(std::move(out), terms, [](Node& self) {
        for (std::size_t t = 0; t < self.parents.size(); ++t) self.accum(t, self.grad);
    });
}

Var scale(const Var& a, double factor) {
    Tensor out = a->value;
    for (double& v : out.data) v *= factor;
    return make_op(std::move(out), {a}, [factor](Node& self) {
        if (self.parents[0]->requires_grad) {
            Tensor g = self.grad;
            for (double& v : g.data) v *= factor;
            self.accum(0, g);
        }
    });
}

Var matmul(const Var& a, const Var& b) {
    if (a->value.rank() != 2 || b->value.rank() != 2 || a->value.cols() != b->value.rows()) {
        throw std::logic_error("matmul: shape mismatch");
    }
    std::size_t m = a->value.rows(), k = a->value.cols(), n = b->value.cols();
    Tensor out({m, n});
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
            double av = a->value.at(i, p);
            if (av == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) out.at(i, j) += av * b->value.at(p, j);
        }
    }
    return make_op(std::move(out), {a, b}, [m, k, n](Node& self) {
        const Tensor& av = self.parents[0]->value;
        const Tensor& bv = self.parents[1]->value;
        if (self.parents[0]->requires_grad) {
            Tensor ga({m, k});
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    double g = self.grad.at(i, j);
                    if (g == 0.0) continue;
                    for (std::size_t p = 0; p < k; ++p) ga.at(i, p) += g * bv.at(p, j);
                }
            }
            self.accum(0, ga);
        }
        if (self.parents[1]->requires_grad) {
            Tensor gb({k, n});
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t p = 0; p < k; ++p) {
                    double a_ip = av.at(i, p);
                    if (a_ip == 0.0) continue;
                    for (std::size_t j = 0; j < n; ++j) gb.at(p, j) += a_ip * self.grad.at(i, j);
                }
            }
            self.accum(1, gb);
        }
    });
}

Var matvec(const Var& a, const Var& x) {
    if (a->value.rank() != 2 || x->value.rank() != 1 || a->value.cols() != x->value.size()) {
        throw std::logic_error("matvec: shape mismatch");
    }
    std::size_t m = a->value.rows(), k = a->value.cols();
    Tensor out({m});
    for (std::size_t i = 0; i < m; ++i) {
        double acc = 0.0;
        const double* row = a->value.data.data() + i * k;
        for (std::size_t p = 0; p < k; ++p) acc += row[p] * x->value.data[p];
        out.data[i] = acc;
    }
    return make_op(std::move(out), {a, x}, [m, k](Node& self) {
        const Tensor& av = self.parents[0]->value;
        const Tensor& xv = self.parents[1]->value;
        if (self.parents[0]->requires_grad) {
            Tensor ga({m, k});
            for (std::size_t i = 0; i < m; ++i) {
                double g = self.grad.data[i];
                if (g == 0.0) continue;
                double* row = ga.data.data() + i * k;
                for (std::size_t p = 0; p < k; ++p) row[p] = g * xv.data[p];
            }
            self.accum(0, ga);
        }
        if (self.parents[1]->requires_grad) {
            Tensor gx({k});
            for (std::size_t i = 0; i < m; ++i) {
                double g = self.grad.data[i];
                if (g == 0.0) continue;
                const double* row = av.data.data() + i * k;
                for (std::size_t p = 0; p < k; ++p) gx.data[p] += g * row[p];
            }
            self.accum(1, gx);
        }
    });
}

Var dot(const Var& a, const Var& b) {
    check_vector(a, "dot");
    check_vector(b, "dot");
    if (a->value.size() != b->value.size()) throw std::logic_error("dot: length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a->value.size(); ++i) acc += a->value.data[i] * b->value.data[i];
    return make_op(Tensor::scalar(acc), {a, b}, [](Node& self) {
        double g = self.grad.data[0];
        if (self.parents[0]->requires_grad) {
            Tensor ga = self.parents[1]->value;
            for (double& v : ga.data) v *= g;
            self.accum(0, ga);
        }
        if (self.parents[1]->requires_grad) {
            Tensor gb = self.parents[0]->value;
            for (double& v : gb.data) v *= g;
            self.accum(1, gb);
        }
    });
}

Var sum(const Var& a) {
    double acc = 0.0;
    for (double v : a->value.data) acc += v;
    return make_op(Tensor::scalar(acc), {a}, [](Node& self) {
        if (self.parents[0]->requires_grad) {
            Tensor g(self.parents[0]->value.shape);
            for (double& v : g.data) v = self.grad.data[0];
            self.accum(0, g);
        }
    });
}

Var concat(const std::vector<Var>& vecs) {
    if (vecs.empty()) throw std::logic_error("concat: no inputs");
    std::size_t total = 0;
    for (const auto& v : vecs) {
        check_vector(v, "concat");
        total += v->value.size();
    }
    Tensor out({total});
    std::size_t pos = 0;
    for (const auto& v : vecs) {
        std::copy(v->value.data.begin(), v->value.data.end(), out.data.begin() + pos);
        pos += v->value.size();
    }
    return make_op(std::move(out), vecs, [](Node& self) {
        std::size_t pos = 0;
        for (std::size_t t = 0; t < self.parents.size(); ++t) {
            std::size_t len = self.parents[t]->value.size();
            if (self.parents[t]->requires_grad) {
                Tensor g({len});
                std::copy(self.grad.data.begin() + pos, self.grad.data.begin() + pos + len,
                          g.data.begin());
                self.accum(t, g);
            }
            pos += len;
        }
    });
}

Var slice(const Var& v, std::size_t start, std::size_t len) {
    check_vector(v, "slice");
    if (start + len > v->value.size()) throw std::logic_error("slice: out of range");
    Tensor out({len});
    std::copy(v->value.data.begin() + start, v->value.data.begin() + start + len,
              out.data.begin());
    return make_op(std::move(out), {v}, [start, len](Node& self) {
        if (self.parents[0]->requires_grad) {
            Tensor g(self.parents[0]->value.shape);
            for (std::size_t i = 0; i < len; ++i) g.data[start + i] = self.grad.data[i];
            self.accum(0, g);
        }
    });
}

Var stack_cols(const std::vector<Var>& cols) {
    if (cols.empty()) throw std::logic_error("stack_cols: no columns");
    std::size_t d = cols[0]->value.size();
    for (const auto& c : cols) {
        check_vector(c, "stack_cols");
        if (c->value.size() != d) throw std::logic_error("stack_cols: length mismatch");
    }
    std::size_t n = cols.size();
    Tensor out({d, n});
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < d; ++i) out.at(i, j) = cols[j]->value.data[i];
    }
    return make_op(std::move(out), cols, [d](Node& self) {
        for (std::size_t j = 0; j < self.parents.size(); ++j) {
            if (!self.parents[j]->requires_grad) continue;
            Tensor g({d});
            for (std::size_t i = 0; i < d; ++i) g.data[i] = self.grad.at(i, j);
            self.accum(j, g);
        }
    });
}

Var sigmoid(const Var& v) {
    Tensor out = v->value;
    for (double& x : out.data) x = 1.0 / (1.0 + std::exp(-x));
    Tensor cached = out;
    return make_op(std::move(out), {v}, [cached = std::move(cached)](Node& self) {
        if (self.parents[0]->requires_grad) {
            Tensor g = self.grad;
            for (std::size_t i = 0; i < g.size(); ++i) {
                double y = cached.data[i];
                g.data[i] *= y * (1.0 - y);
            }
            self.accum(0, g);
        }
    });
}

Var tanh_op(const Var& v) {
    Tensor out = v->value;
    for (double& x : out.data) x = std::tanh(x);
    Tensor cached = out;
    return make_op(std::move(out), {v}, [cached = std::move(cached)](Node& self) {
        if (self.parents[0]->requires_grad) {
            Tensor g = self.grad;
            for (std::size_t i = 0; i < g.size(); ++i) {
                double y = cached.data[i];
                g.data[i] *= 1.0 - y * y;
            }
            self.accum(0, g);
        }
    });
}

Var softmax_op(const Var& v) {
    check_vector(v, "softmax");
    if (v->value.size() == 0) throw std::logic_error("softmax: empty vector");
    for (double x : v->value.data) {
        if (!std::isfinite(x)) throw numeric_error("softmax: non-finite input");
    }
    double max_v = *std::max_element(v->value.data.begin(), v->value.data.end());
    Tensor out = v->value;
    double total = 0.0;
    for (double& x : out.data) {
        x = std::exp(x - max_v);
        total += x;
    }
    for (double& x : out.data) x /= total;
    Tensor cached = out;
    return make_op(std::move(out), {v}, [cached = std::move(cached)](Node& self) {
        if (self.parents[0]->requires_grad) {
            double inner = 0.0;
            for (std::size_t i = 0; i < cached.size(); ++i) {
                inner += cached.data[i] * self.grad.data[i];
            }
            Tensor g = self.grad;
            for (std::size_t i = 0; i < g.size(); ++i) {
                g.data[i] = cached.data[i] * (g.data[i] - inner);
            }
            self.accum(0, g);
        }
    });
}

Var pick_log(const Var& v, std::size_t index, double floor) {
    check_vector(v, "pick_log");
    if (index >= v->value.size()) throw std::logic_error("pick_log: index out of range");
    double p = v->value.data[index];
    double clamped = std::max(p, floor);
    return make_op(Tensor::scalar(std::log(clamped)), {v},
                   [index, floor, p](Node& self) {
                       if (self.parents[0]->requires_grad && p > floor) {
                           Tensor g(self.parents[0]->value.shape);
                           g.data[index] = self.grad.data[0] / p;
                           self.accum(0, g);
                       }
                   });
}

} // namespace revsynth
