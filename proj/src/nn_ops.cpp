#include "revsynth/nn_ops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "revsynth/errors.hpp"

namespace revsynth {

namespace {

// Local clone of autodiff.cpp's op factory (kept private there on purpose;
// fused ops need the same semantics).
Var fused_op(Tensor value, std::vector<Var> parents, std::function<void(Node&)> backprop) {
    auto node = std::make_shared<Node>();
    node->value = std::move(value);
    bool any = false;
    if (grad_enabled()) {
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

std::pair<Var, Var> lstm_cell(const Var& x, const Var& h_prev, const Var& c_prev,
                              const Var& w, const Var& bias) {
    std::size_t in = x->value.size();
    std::size_t d = h_prev->value.size();
    if (c_prev->value.size() != d) throw std::logic_error("lstm_cell: c_prev size mismatch");
    if (w->value.rank() != 2 || w->value.rows() != 4 * d || w->value.cols() != in + d) {
        throw std::logic_error("lstm_cell: weight shape mismatch");
    }
    if (bias->value.size() != 4 * d) throw std::logic_error("lstm_cell: bias size mismatch");

    Tensor z({in + d});
    std::copy(x->value.data.begin(), x->value.data.end(), z.data.begin());
    std::copy(h_prev->value.data.begin(), h_prev->value.data.end(), z.data.begin() + in);

    Tensor gates({4 * d});
    for (std::size_t r = 0; r < 4 * d; ++r) {
        double acc = bias->value.data[r];
        const double* row = w->value.data.data() + r * (in + d);
        for (std::size_t c = 0; c < in + d; ++c) acc += row[c] * z.data[c];
        gates.data[r] = acc;
    }
    for (std::size_t j = 0; j < 3 * d; ++j) gates.data[j] = 1.0 / (1.0 + std::exp(-gates.data[j]));
    for (std::size_t j = 3 * d; j < 4 * d; ++j) gates.data[j] = std::tanh(gates.data[j]);

    Tensor hc({2 * d});
    Tensor tanh_c({d});
    for (std::size_t j = 0; j < d; ++j) {
        double i_g = gates.data[j];
        double f_g = gates.data[d + j];
        double o_g = gates.data[2 * d + j];
        double g_g = gates.data[3 * d + j];
        double c_new = f_g * c_prev->value.data[j] + i_g * g_g;
        tanh_c.data[j] = std::tanh(c_new);
        hc.data[j] = o_g * tanh_c.data[j];
        hc.data[d + j] = c_new;
    }

    Var node = fused_op(
        std::move(hc), {x, h_prev, c_prev, w, bias},
        [in, d, z = std::move(z), gates = std::move(gates),
         tanh_c = std::move(tanh_c)](Node& self) {
            const Tensor& c_prev_v = self.parents[2]->value;
            const Tensor& w_v = self.parents[3]->value;
            Tensor dpre({4 * d});
            Tensor dc_prev({d});
            for (std::size_t j = 0; j < d; ++j) {
                double dh = self.grad.data[j];
                double dc = self.grad.data[d + j];
                double i_g = gates.data[j];
                double f_g = gates.data[d + j];
                double o_g = gates.data[2 * d + j];
                double g_g = gates.data[3 * d + j];
                double tc = tanh_c.data[j];
                double d_o = dh * tc;
                dc += dh * o_g * (1.0 - tc * tc);
                double d_i = dc * g_g;
                double d_f = dc * c_prev_v.data[j];
                double d_g = dc * i_g;
                dc_prev.data[j] = dc * f_g;
                dpre.data[j] = d_i * i_g * (1.0 - i_g);
                dpre.data[d + j] = d_f * f_g * (1.0 - f_g);
                dpre.data[2 * d + j] = d_o * o_g * (1.0 - o_g);
                dpre.data[3 * d + j] = d_g * (1.0 - g_g * g_g);
            }
            if (self.parents[4]->requires_grad) {
                Tensor& bg = self.parents[4]->ensure_grad();
                for (std::size_t r = 0; r < 4 * d; ++r) bg.data[r] += dpre.data[r];
            }
            if (self.parents[3]->requires_grad) {
                Tensor& wg = self.parents[3]->ensure_grad();
                for (std::size_t r = 0; r < 4 * d; ++r) {
                    double g = dpre.data[r];
                    if (g == 0.0) continue;
                    double* row = wg.data.data() + r * (in + d);
                    for (std::size_t c = 0; c < in + d; ++c) row[c] += g * z.data[c];
                }
            }
            bool need_x = self.parents[0]->requires_grad;
            bool need_h = self.parents[1]->requires_grad;
            if (need_x || need_h) {
                Tensor dz({in + d});
                for (std::size_t r = 0; r < 4 * d; ++r) {
                    double g = dpre.data[r];
                    if (g == 0.0) continue;
                    const double* row = w_v.data.data() + r * (in + d);
                    for (std::size_t c = 0; c < in + d; ++c) dz.data[c] += g * row[c];
                }
                if (need_x) {
                    Tensor gx({in});
                    std::copy(dz.data.begin(), dz.data.begin() + in, gx.data.begin());
                    self.accum(0, gx);
                }
                if (need_h) {
                    Tensor gh({d});
                    std::copy(dz.data.begin() + in, dz.data.end(), gh.data.begin());
                    self.accum(1, gh);
                }
            }
            if (self.parents[2]->requires_grad) self.accum(2, dc_prev);
        });
    return {slice(node, 0, d), slice(node, d, d)};
}

Var embed(const Var& table, std::size_t id) {
    if (table->value.rank() != 2) throw std::logic_error("embed: table must be 2-d");
    if (id >= table->value.rows()) {
        throw data_error("embed: id " + std::to_string(id) + " out of range");
    }
    std::size_t width = table->value.cols();
    Tensor out({width});
    std::copy(table->value.data.begin() + id * width,
              table->value.data.begin() + (id + 1) * width, out.data.begin());
    return fused_op(std::move(out), {table}, [id, width](Node& self) {
        Node& t = *self.parents[0];
        if (!t.requires_grad) return;
        Tensor& tg = t.ensure_grad();
        for (std::size_t j = 0; j < width; ++j) {
            tg.data[id * width + j] += self.grad.data[j];
        }
    });
}

Attention attend(const Var& h_seq, const Var& w2_h_seq, const Var& h_prev, const Var& w1,
                 const Var& v) {
    if (h_seq->value.rank() != 2) throw std::logic_error("attend: h_seq must be 2-d");
    std::size_t d = h_seq->value.rows();
    std::size_t m = h_seq->value.cols();
    if (m == 0) throw std::logic_error("attend: no source positions");
    if (!w2_h_seq->value.same_shape(h_seq->value)) {
        throw std::logic_error("attend: projected sequence shape mismatch");
    }
    if (h_prev->value.size() != d || v->value.size() != d ||
        w1->value.rank() != 2 || w1->value.rows() != d || w1->value.cols() != d) {
        throw std::logic_error("attend: parameter shape mismatch");
    }

    Tensor q({d});
    for (std::size_t r = 0; r < d; ++r) {
        double acc = 0.0;
        const double* row = w1->value.data.data() + r * d;
        for (std::size_t c = 0; c < d; ++c) acc += row[c] * h_prev->value.data[c];
        q.data[r] = acc;
    }
    Tensor t_mat({d, m});
    Tensor scores({m});
    for (std::size_t k = 0; k < m; ++k) {
        double e = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            double t = std::tanh(q.data[j] + w2_h_seq->value.at(j, k));
            t_mat.at(j, k) = t;
            e += v->value.data[j] * t;
        }
        scores.data[k] = e;
    }
    double max_e = *std::max_element(scores.data.begin(), scores.data.end());
    Tensor a({m});
    double total = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        a.data[k] = std::exp(scores.data[k] - max_e);
        total += a.data[k];
    }
    for (std::size_t k = 0; k < m; ++k) a.data[k] /= total;

    Tensor context({d});
    for (std::size_t k = 0; k < m; ++k) {
        double ak = a.data[k];
        for (std::size_t j = 0; j < d; ++j) context.data[j] += ak * h_seq->value.at(j, k);
    }

    std::vector<double> weights = a.data;
    Var node = fused_op(
        std::move(context), {h_seq, w2_h_seq, h_prev, w1, v},
        [d, m, a = std::move(a), t_mat = std::move(t_mat)](Node& self) {
            const Tensor& h_seq_v = self.parents[0]->value;
            const Tensor& h_prev_v = self.parents[2]->value;
            const Tensor& w1_v = self.parents[3]->value;
            const Tensor& v_v = self.parents[4]->value;

            Tensor da({m});
            for (std::size_t k = 0; k < m; ++k) {
                double acc = 0.0;
                for (std::size_t j = 0; j < d; ++j) acc += h_seq_v.at(j, k) * self.grad.data[j];
                da.data[k] = acc;
            }
            if (self.parents[0]->requires_grad) {
                Tensor& hg = self.parents[0]->ensure_grad();
                for (std::size_t k = 0; k < m; ++k) {
                    double ak = a.data[k];
                    if (ak == 0.0) continue;
                    for (std::size_t j = 0; j < d; ++j) {
                        hg.at(j, k) += ak * self.grad.data[j];
                    }
                }
            }
            double inner = 0.0;
            for (std::size_t k = 0; k < m; ++k) inner += a.data[k] * da.data[k];
            Tensor de({m});
            for (std::size_t k = 0; k < m; ++k) de.data[k] = a.data[k] * (da.data[k] - inner);

            Tensor dq({d});
            Tensor dv({d});
            Tensor dp({d, m});
            for (std::size_t k = 0; k < m; ++k) {
                double dek = de.data[k];
                for (std::size_t j = 0; j < d; ++j) {
                    double t = t_mat.at(j, k);
                    dv.data[j] += dek * t;
                    double dpre = dek * v_v.data[j] * (1.0 - t * t);
                    dp.at(j, k) = dpre;
                    dq.data[j] += dpre;
                }
            }
            if (self.parents[4]->requires_grad) self.accum(4, dv);
            if (self.parents[1]->requires_grad) self.accum(1, dp);
            if (self.parents[3]->requires_grad) {
                Tensor& wg = self.parents[3]->ensure_grad();
                for (std::size_t r = 0; r < d; ++r) {
                    double g = dq.data[r];
                    if (g == 0.0) continue;
                    for (std::size_t c = 0; c < d; ++c) wg.at(r, c) += g * h_prev_v.data[c];
                }
            }
            if (self.parents[2]->requires_grad) {
                Tensor gh({d});
                for (std::size_t r = 0; r < d; ++r) {
                    double g = dq.data[r];
                    if (g == 0.0) continue;
                    for (std::size_t c = 0; c < d; ++c) gh.data[c] += g * w1_v.at(r, c);
                }
                self.accum(2, gh);
            }
        });
    return Attention{node, std::move(weights)};
}

Var similarity_matrix(const Var& r_seq, const Var& x_seq, const Var& w) {
    if (r_seq->value.rank() != 2 || x_seq->value.rank() != 2) {
        throw std::logic_error("similarity_matrix: sequences must be 2-d");
    }
    std::size_t d = r_seq->value.rows();
    std::size_t u = r_seq->value.cols();
    std::size_t n = x_seq->value.cols();
    if (x_seq->value.rows() != d) throw std::logic_error("similarity_matrix: row mismatch");
    if (w->value.size() != 3 * d) {
        throw std::logic_error("similarity_matrix: weight must have length 3d");
    }

    const double* w1 = w->value.data.data();
    const double* w2 = w1 + d;
    const double* w3 = w2 + d;

    Tensor rw({u});
    for (std::size_t b = 0; b < u; ++b) {
        double acc = 0.0;
        for (std::size_t j = 0; j < d; ++j) acc += w1[j] * r_seq->value.at(j, b);
        rw.data[b] = acc;
    }
    Tensor xw({n});
    for (std::size_t k = 0; k < n; ++k) {
        double acc = 0.0;
        for (std::size_t j = 0; j < d; ++j) acc += w2[j] * x_seq->value.at(j, k);
        xw.data[k] = acc;
    }
    Tensor s({u, n});
    for (std::size_t b = 0; b < u; ++b) {
        for (std::size_t k = 0; k < n; ++k) {
            double cross = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                cross += w3[j] * r_seq->value.at(j, b) * x_seq->value.at(j, k);
            }
            s.at(b, k) = rw.data[b] + xw.data[k] + cross;
        }
    }

    return fused_op(std::move(s), {r_seq, x_seq, w}, [d, u, n](Node& self) {
        const Tensor& r_v = self.parents[0]->value;
        const Tensor& x_v = self.parents[1]->value;
        const Tensor& w_v = self.parents[2]->value;
        const double* w1 = w_v.data.data();
        const double* w2 = w1 + d;
        const double* w3 = w2 + d;

        Tensor drow({u});
        Tensor dcol({n});
        for (std::size_t b = 0; b < u; ++b) {
            for (std::size_t k = 0; k < n; ++k) {
                double g = self.grad.at(b, k);
                drow.data[b] += g;
                dcol.data[k] += g;
            }
        }
        // cross_r[j][b] = sum_k x[j][k] * dS[b][k]; cross_x[j][k] = sum_b r[j][b] * dS[b][k]
        Tensor cross_r({d, u});
        Tensor cross_x({d, n});
        for (std::size_t j = 0; j < d; ++j) {
            for (std::size_t b = 0; b < u; ++b) {
                double acc = 0.0;
                for (std::size_t k = 0; k < n; ++k) acc += x_v.at(j, k) * self.grad.at(b, k);
                cross_r.at(j, b) = acc;
            }
            for (std::size_t k = 0; k < n; ++k) {
                double acc = 0.0;
                for (std::size_t b = 0; b < u; ++b) acc += r_v.at(j, b) * self.grad.at(b, k);
                cross_x.at(j, k) = acc;
            }
        }
        if (self.parents[0]->requires_grad) {
            Tensor& rg = self.parents[0]->ensure_grad();
            for (std::size_t j = 0; j < d; ++j) {
                for (std::size_t b = 0; b < u; ++b) {
                    rg.at(j, b) += w1[j] * drow.data[b] + w3[j] * cross_r.at(j, b);
                }
            }
        }
        if (self.parents[1]->requires_grad) {
            Tensor& xg = self.parents[1]->ensure_grad();
            for (std::size_t j = 0; j < d; ++j) {
                for (std::size_t k = 0; k < n; ++k) {
                    xg.at(j, k) += w2[j] * dcol.data[k] + w3[j] * cross_x.at(j, k);
                }
            }
        }
        if (self.parents[2]->requires_grad) {
            Tensor& wg = self.parents[2]->ensure_grad();
            for (std::size_t j = 0; j < d; ++j) {
                double g1 = 0.0, g2 = 0.0, g3 = 0.0;
                for (std::size_t b = 0; b < u; ++b) g1 += r_v.at(j, b) * drow.data[b];
                for (std::size_t k = 0; k < n; ++k) g2 += x_v.at(j, k) * dcol.data[k];
                for (std::size_t b = 0; b < u; ++b) g3 += r_v.at(j, b) * cross_r.at(j, b);
                wg.data[j] += g1;
                wg.data[d + j] += g2;
                wg.data[2 * d + j] += g3;
            }
        }
    });
}

Var rowmax(const Var& m) {
    if (m->value.rank() != 2) throw std::logic_error("rowmax: expected a matrix");
    std::size_t rows = m->value.rows();
    std::size_t cols = m->value.cols();
    if (cols == 0) throw std::logic_error("rowmax: empty rows");
    Tensor out({rows});
    std::vector<std::size_t> arg(rows, 0);
    for (std::size_t r = 0; r < rows; ++r) {
        double best = m->value.at(r, 0);
        for (std::size_t c = 1; c < cols; ++c) {
            if (m->value.at(r, c) > best) {
                best = m->value.at(r, c);
                arg[r] = c;
            }
        }
        out.data[r] = best;
    }
    return fused_op(std::move(out), {m}, [rows, cols, arg = std::move(arg)](Node& self) {
        if (!self.parents[0]->requires_grad) return;
        Tensor g({rows, cols});
        for (std::size_t r = 0; r < rows; ++r) g.at(r, arg[r]) = self.grad.data[r];
        self.accum(0, g);
    });
}

Var tile_cols(const Var& v, std::size_t n) {
    if (v->value.rank() != 1) throw std::logic_error("tile_cols: expected a vector");
    if (n == 0) throw std::logic_error("tile_cols: need at least one column");
    std::size_t d = v->value.size();
    Tensor out({d, n});
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t k = 0; k < n; ++k) out.at(j, k) = v->value.data[j];
    }
    return fused_op(std::move(out), {v}, [d, n](Node& self) {
        if (!self.parents[0]->requires_grad) return;
        Tensor g({d});
        for (std::size_t j = 0; j < d; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < n; ++k) acc += self.grad.at(j, k);
            g.data[j] = acc;
        }
        self.accum(0, g);
    });
}

Var scale_cols(const Var& m, const Var& z) {
    if (m->value.rank() != 2 || z->value.rank() != 1 || m->value.cols() != z->value.size()) {
        throw std::logic_error("scale_cols: shape mismatch");
    }
    std::size_t d = m->value.rows();
    std::size_t u = m->value.cols();
    Tensor out({d, u});
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t b = 0; b < u; ++b) out.at(j, b) = m->value.at(j, b) * z->value.data[b];
    }
    return fused_op(std::move(out), {m, z}, [d, u](Node& self) {
        const Tensor& m_v = self.parents[0]->value;
        const Tensor& z_v = self.parents[1]->value;
        if (self.parents[0]->requires_grad) {
            Tensor& mg = self.parents[0]->ensure_grad();
            for (std::size_t j = 0; j < d; ++j) {
                for (std::size_t b = 0; b < u; ++b) {
                    mg.at(j, b) += self.grad.at(j, b) * z_v.data[b];
                }
            }
        }
        if (self.parents[1]->requires_grad) {
            Tensor zg({u});
            for (std::size_t b = 0; b < u; ++b) {
                double acc = 0.0;
                for (std::size_t j = 0; j < d; ++j) acc += self.grad.at(j, b) * m_v.at(j, b);
                zg.data[b] = acc;
            }
            self.accum(1, zg);
        }
    });
}

Var concat_cols(const std::vector<Var>& blocks) {
    if (blocks.empty()) throw std::logic_error("concat_cols: need at least one block");
    std::size_t d = blocks[0]->value.rows();
    std::size_t total = 0;
    for (const Var& b : blocks) {
        if (b->value.rank() != 2 || b->value.rows() != d) {
            throw std::logic_error("concat_cols: row mismatch");
        }
        total += b->value.cols();
    }
    Tensor out({d, total});
    std::size_t col = 0;
    for (const Var& b : blocks) {
        for (std::size_t j = 0; j < d; ++j) {
            for (std::size_t k = 0; k < b->value.cols(); ++k) {
                out.at(j, col + k) = b->value.at(j, k);
            }
        }
        col += b->value.cols();
    }
    return fused_op(std::move(out), blocks, [d](Node& self) {
        std::size_t start = 0;
        for (std::size_t pi = 0; pi < self.parents.size(); ++pi) {
            const auto& p = self.parents[pi];
            std::size_t pc = p->value.cols();
            if (p->requires_grad) {
                Tensor g(p->value.shape);
                for (std::size_t j = 0; j < d; ++j) {
                    for (std::size_t k = 0; k < pc; ++k) g.at(j, k) = self.grad.at(j, start + k);
                }
                self.accum(pi, g);
            }
            start += pc;
        }
    });
}

Var dropout(const Var& v, double rate, Rng& rng) {
    if (rate < 0.0 || rate >= 1.0) throw std::logic_error("dropout: rate must be in [0, 1)");
    if (rate == 0.0) return v;
    double keep = 1.0 - rate;
    Tensor mask(v->value.shape);
    for (double& m : mask.data) m = rng.bernoulli(keep) ? 1.0 / keep : 0.0;
    Tensor out = v->value;
    for (std::size_t i = 0; i < out.size(); ++i) out.data[i] *= mask.data[i];
    return fused_op(std::move(out), {v}, [mask = std::move(mask)](Node& self) {
        if (!self.parents[0]->requires_grad) return;
        Tensor g = self.grad;
        for (std::size_t i = 0; i < g.size(); ++i) g.data[i] *= mask.data[i];
        self.accum(0, g);
    });
}

} // namespace revsynth
