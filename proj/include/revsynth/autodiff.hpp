#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "revsynth/tensor.hpp"

namespace revsynth {

struct Node;
using Var = std::shared_ptr<Node>;

// One value in a recorded computation. The backprop closure reads this node's
// grad and accumulates into the parents' grads.
struct Node {
    Tensor value;
    Tensor grad;  // allocated on first accumulation
    bool requires_grad = false;
    std::vector<Var> parents;
    std::function<void(Node&)> backprop;

    Tensor& ensure_grad() {
        if (grad.data.empty()) grad = Tensor(value.shape);
        return grad;
    }
    void accum(std::size_t parent_idx, const Tensor& g);
    void zero_grad() { grad = Tensor(); }
};

// While alive on a thread, newly created nodes record no parents or
// closures, so inference builds no graph.
class NoGradGuard {
public:
    NoGradGuard();
    ~NoGradGuard();
    NoGradGuard(const NoGradGuard&) = delete;
    NoGradGuard& operator=(const NoGradGuard&) = delete;

private:
    bool previous_;
};

bool grad_enabled();

Var make_var(Tensor value, bool requires_grad = false);
Var make_leaf(Tensor value);  // requires_grad = true

// Reverse sweep from a scalar. Seeds d(loss)/d(loss) = seed_scale, runs every
// recorded closure in reverse topological order, then severs the graph so
// teardown never recurses. Parameter grads survive and accumulate across
// calls until zeroed.
void backward(const Var& loss, double seed_scale = 1.0);

// Elementwise, shapes must match.
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var add_n(const std::vector<Var>& terms);
Var scale(const Var& a, double factor);

Var matmul(const Var& a, const Var& b);   // (m,k)x(k,n) -> (m,n)
Var matvec(const Var& a, const Var& x);   // (m,k)x(k) -> (m)
Var dot(const Var& a, const Var& b);      // vectors -> scalar
Var sum(const Var& a);                    // all elements -> scalar

Var concat(const std::vector<Var>& vecs); // vectors -> one vector
Var slice(const Var& v, std::size_t start, std::size_t len);

// Vectors of length d stacked as matrix columns -> (d, n).
Var stack_cols(const std::vector<Var>& cols);

Var sigmoid(const Var& v);
Var tanh_op(const Var& v);

// Vector -> probability vector, max-subtracted. Throws numeric_error on
// non-finite input.
Var softmax_op(const Var& v);

// log(max(v[index], floor)) as a scalar; gradient is zero at floored entries.
Var pick_log(const Var& v, std::size_t index, double floor = 1e-12);

} // namespace revsynth
