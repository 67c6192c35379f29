#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "revsynth/autodiff.hpp"
#include "revsynth/rng.hpp"

namespace revsynth {

// One LSTM step. W is (4d, in+d) over the concatenated [x; h_prev], bias is
// (4d); gate row order is input, forget, output, candidate. Returns (h, c).
std::pair<Var, Var> lstm_cell(const Var& x, const Var& h_prev, const Var& c_prev,
                              const Var& w, const Var& bias);

// Row id of an embedding table (rows, width) as a width-vector; the gradient
// scatter-adds into that row.
Var embed(const Var& table, std::size_t id);

struct Attention {
    Var context;                  // (d)
    std::vector<double> weights;  // softmax weights over the m columns
};

// Additive attention over the columns of h_seq (d, m). Scores are
// v . tanh(w1 h_prev + w2_h_seq_:k); w2_h_seq = w2 * h_seq must be
// precomputed (once per sequence) so its cost is not paid every step.
Attention attend(const Var& h_seq, const Var& w2_h_seq, const Var& h_prev, const Var& w1,
                 const Var& v);

// Pairwise scores between columns of r_seq (d, u) and x_seq (d, n):
// out[b][k] = w . [r_b (+) x_k (+) r_b * x_k] with w of length 3d split into
// thirds. Returns (u, n).
Var similarity_matrix(const Var& r_seq, const Var& x_seq, const Var& w);

// Per-row maximum of a matrix (ties keep the first column) -> vector.
Var rowmax(const Var& m);

// Vector (d) copied into every one of n columns -> (d, n).
Var tile_cols(const Var& v, std::size_t n);

// Column b of m (d, u) scaled by z[b] -> (d, u).
Var scale_cols(const Var& m, const Var& z);

// Matrices (d, n_i) joined along columns -> (d, sum n_i).
Var concat_cols(const std::vector<Var>& blocks);

// Inverted dropout: keeps each entry with probability 1-rate, scaling kept
// entries by 1/(1-rate). rate 0 is the identity. Training only; callers skip
// it at inference.
Var dropout(const Var& v, double rate, Rng& rng);

} // namespace revsynth
