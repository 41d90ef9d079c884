#pragma once

#include <Eigen/Dense>
#include <bit>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "brdflab/math.hpp"
#include "brdflab/rng.hpp"

namespace brdflab {

// Dense batched tensor math on Eigen. Values are doubles: the gradient
// contracts (finite-difference agreement at 1e-4 relative with h = 1e-4)
// sit below float32 noise, and reductions accumulate at full width anyway.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class OutputKind : std::uint32_t { Linear = 0, Sigmoid = 1, Softplus = 2, Relu = 3 };

/// One contiguous slice of the output vector with its own nonlinearity.
/// scale multiplies the activated value (softplus specular heads use 0.5);
/// input_scale multiplies the pre-activation (halved sigmoid inputs).
struct OutputSegment {
    OutputKind kind = OutputKind::Linear;
    int count = 0;
    double scale = 1.0;
    double input_scale = 1.0;
};

/// Fixed-topology MLP: `depth` weight layers, ReLU between them, the last
/// layer activated per output segment. The primary input can be
/// re-concatenated at one layer (skip_layer) and an auxiliary feature block
/// can be concatenated at another (aux_layer), both 0-based indices of the
/// receiving weight layer.
struct MLPConfig {
    int input_dim = 0;
    int aux_dim = 0;
    int width = 128;
    int depth = 0;
    int skip_layer = -1;
    int aux_layer = 0;
    std::vector<OutputSegment> output;

    int output_dim() const {
        int n = 0;
        for (const auto &seg : output) n += seg.count;
        return n;
    }

    int layer_in(int k) const {
        int n = (k == 0) ? input_dim : width;
        if (k == skip_layer && k != 0) n += layer0_width();
        if (k == aux_layer && aux_dim > 0 && k != 0) n += aux_dim;
        if (k == 0 && aux_dim > 0 && aux_layer == 0) n += aux_dim;
        return n;
    }

    int layer_out(int k) const { return (k == depth - 1) ? output_dim() : width; }

    // What layer 0 consumed; the skip connection re-concatenates exactly this.
    int layer0_width() const {
        return input_dim + ((aux_dim > 0 && aux_layer == 0) ? aux_dim : 0);
    }

    void validate() const {
        if (depth < 1) throw std::invalid_argument("MLPConfig: depth must be >= 1");
        if (output.empty()) throw std::invalid_argument("MLPConfig: no output segments");
        if (skip_layer >= depth) throw std::invalid_argument("MLPConfig: skip_layer out of range");
        if (aux_dim > 0 && (aux_layer < 0 || aux_layer >= depth))
            throw std::invalid_argument("MLPConfig: aux_layer out of range");
        // skip_layer == 0 is legal and a no-op: the input is already there.
    }

    std::int64_t parameter_count() const {
        std::int64_t n = 0;
        for (int k = 0; k < depth; ++k) n += std::int64_t(layer_out(k)) * layer_in(k) + layer_out(k);
        return n;
    }
};

/// Weights, biases and Adam moment buffers for one MLP.
struct MLPState {
    std::vector<Matrix> W;   // [out x in] per layer
    std::vector<Vector> b;
    std::vector<Matrix> mW, vW;
    std::vector<Vector> mb, vb;
    std::int64_t step = 0;
};

/// He-style fan-in scaled uniform init, biases zero. Element order is fixed
/// (column major), so a given seed always produces the same network.
inline MLPState init_mlp(const MLPConfig &cfg, std::uint64_t seed) {
    cfg.validate();
    MLPState s;
    Rng rng(seed);
    for (int k = 0; k < cfg.depth; ++k) {
        int in = cfg.layer_in(k), out = cfg.layer_out(k);
        double limit = std::sqrt(6.0 / in);
        Matrix w(out, in);
        for (int j = 0; j < in; ++j)
            for (int i = 0; i < out; ++i) w(i, j) = rng.uniform(-limit, limit);
        s.W.push_back(std::move(w));
        s.b.push_back(Vector::Zero(out));
        s.mW.push_back(Matrix::Zero(out, in));
        s.vW.push_back(Matrix::Zero(out, in));
        s.mb.push_back(Vector::Zero(out));
        s.vb.push_back(Vector::Zero(out));
    }
    return s;
}

inline void zero_weights(MLPState &s) {
    for (auto &w : s.W) w.setZero();
    for (auto &v : s.b) v.setZero();
}

/// Everything the backward pass needs: per-layer post-concat inputs and
/// pre-activations. Row = sample.
struct MLPTape {
    std::vector<Matrix> inputs;
    std::vector<Matrix> z;
    Matrix out;
};

namespace detail {

inline void apply_output_segments(const MLPConfig &cfg, const Matrix &z, Matrix &y) {
    y.resize(z.rows(), z.cols());
    int col = 0;
    for (const auto &seg : cfg.output) {
        for (int c = col; c < col + seg.count; ++c) {
            for (Eigen::Index r = 0; r < z.rows(); ++r) {
                double zz = seg.input_scale * z(r, c);
                switch (seg.kind) {
                    case OutputKind::Linear: y(r, c) = zz; break;
                    case OutputKind::Sigmoid: y(r, c) = seg.scale * sigmoid(zz); break;
                    case OutputKind::Softplus: y(r, c) = seg.scale * softplus(zz); break;
                    case OutputKind::Relu: y(r, c) = seg.scale * std::max(0.0, zz); break;
                }
            }
        }
        col += seg.count;
    }
}

inline void output_segments_backward(const MLPConfig &cfg, const Matrix &z, const Matrix &dy,
                                     Matrix &dz) {
    dz.resize(z.rows(), z.cols());
    int col = 0;
    for (const auto &seg : cfg.output) {
        for (int c = col; c < col + seg.count; ++c) {
            for (Eigen::Index r = 0; r < z.rows(); ++r) {
                double zz = seg.input_scale * z(r, c);
                double d = 0.0;
                switch (seg.kind) {
                    case OutputKind::Linear: d = 1.0; break;
                    case OutputKind::Sigmoid: d = seg.scale * sigmoid_deriv(zz); break;
                    case OutputKind::Softplus: d = seg.scale * sigmoid(zz); break;
                    case OutputKind::Relu: d = zz > 0.0 ? seg.scale : 0.0; break;
                }
                dz(r, c) = dy(r, c) * d * seg.input_scale;
            }
        }
        col += seg.count;
    }
}

}  // namespace detail

/// Batched forward pass; rows are samples. aux may be empty when the config
/// declares no auxiliary inputs. Fills the tape when given.
inline Matrix mlp_forward(const MLPState &s, const MLPConfig &cfg, const Matrix &x,
                          const Matrix &aux = Matrix(), MLPTape *tape = nullptr) {
    if (x.cols() != cfg.input_dim) throw std::invalid_argument("mlp_forward: input width mismatch");
    if (cfg.aux_dim > 0 && aux.cols() != cfg.aux_dim)
        throw std::invalid_argument("mlp_forward: aux width mismatch");
    const Eigen::Index n = x.rows();

    Matrix layer0;
    if (cfg.aux_dim > 0 && cfg.aux_layer == 0) {
        layer0.resize(n, cfg.input_dim + cfg.aux_dim);
        layer0 << x, aux;
    } else {
        layer0 = x;
    }

    if (tape) {
        tape->inputs.assign(cfg.depth, Matrix());
        tape->z.assign(cfg.depth, Matrix());
    }

    Matrix a = layer0;
    for (int k = 0; k < cfg.depth; ++k) {
        Matrix in;
        bool skip = (k == cfg.skip_layer && k != 0);
        bool feed_aux = (cfg.aux_dim > 0 && k == cfg.aux_layer && k != 0);
        if (skip && feed_aux) {
            in.resize(n, a.cols() + layer0.cols() + aux.cols());
            in << a, layer0, aux;
        } else if (skip) {
            in.resize(n, a.cols() + layer0.cols());
            in << a, layer0;
        } else if (feed_aux) {
            in.resize(n, a.cols() + aux.cols());
            in << a, aux;
        } else {
            in = a;
        }

        Matrix z = (in * s.W[k].transpose()).rowwise() + s.b[k].transpose();
        if (tape) {
            tape->inputs[k] = std::move(in);
            tape->z[k] = z;
        }
        if (k + 1 < cfg.depth) {
            a = z.cwiseMax(0.0);  // ReLU; exact zeros carry subgradient 0
        } else {
            detail::apply_output_segments(cfg, z, a);
        }
    }
    if (tape) tape->out = a;
    return a;
}

struct MLPGrads {
    std::vector<Matrix> dW;
    std::vector<Vector> db;
    Matrix dx;
    Matrix daux;
};

/// Reverse pass over a recorded forward. Gradients are exact for the
/// recorded computation (ReLU uses subgradient 0 at z = 0).
inline MLPGrads mlp_backward(const MLPState &s, const MLPConfig &cfg, const MLPTape &tape,
                             const Matrix &dout) {
    if (tape.inputs.size() != std::size_t(cfg.depth))
        throw std::invalid_argument("mlp_backward: tape does not match config");
    const Eigen::Index n = tape.inputs[0].rows();
    if (dout.rows() != n || dout.cols() != cfg.output_dim())
        throw std::invalid_argument("mlp_backward: output grad shape mismatch");

    MLPGrads g;
    g.dW.resize(cfg.depth);
    g.db.resize(cfg.depth);
    Matrix dlayer0 = Matrix::Zero(n, cfg.layer0_width());
    if (cfg.aux_dim > 0) g.daux = Matrix::Zero(n, cfg.aux_dim);

    Matrix da;  // gradient wrt the activation flowing backwards
    for (int k = cfg.depth - 1; k >= 0; --k) {
        Matrix dz;
        if (k == cfg.depth - 1) {
            detail::output_segments_backward(cfg, tape.z[k], dout, dz);
        } else {
            dz = (tape.z[k].array() > 0.0).cast<double>().matrix().cwiseProduct(da);
        }
        g.dW[k] = dz.transpose() * tape.inputs[k];
        g.db[k] = dz.colwise().sum().transpose();

        Matrix din = dz * s.W[k];
        // un-concatenate
        Eigen::Index col = din.cols();
        bool skip = (k == cfg.skip_layer && k != 0);
        bool feed_aux = (cfg.aux_dim > 0 && k == cfg.aux_layer && k != 0);
        if (feed_aux) {
            g.daux += din.rightCols(cfg.aux_dim);
            col -= cfg.aux_dim;
        }
        if (skip) {
            dlayer0 += din.middleCols(col - cfg.layer0_width(), cfg.layer0_width());
            col -= cfg.layer0_width();
        }
        if (k == 0) {
            dlayer0 += din.leftCols(col);
        } else {
            da = din.leftCols(col);
        }
    }

    if (cfg.aux_dim > 0 && cfg.aux_layer == 0) {
        g.dx = dlayer0.leftCols(cfg.input_dim);
        g.daux += dlayer0.rightCols(cfg.aux_dim);
    } else {
        g.dx = std::move(dlayer0);
    }
    return g;
}

struct AdamConfig {
    double lr = 5e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Standard bias-corrected Adam update; increments the step counter.
inline void adam_step(MLPState &s, const MLPGrads &g, const AdamConfig &cfg) {
    if (g.dW.size() != s.W.size()) throw std::invalid_argument("adam_step: grad shape mismatch");
    s.step += 1;
    double c1 = 1.0 - std::pow(cfg.beta1, double(s.step));
    double c2 = 1.0 - std::pow(cfg.beta2, double(s.step));
    for (std::size_t k = 0; k < s.W.size(); ++k) {
        if (g.dW[k].rows() != s.W[k].rows() || g.dW[k].cols() != s.W[k].cols())
            throw std::invalid_argument("adam_step: grad shape mismatch");
        s.mW[k] = cfg.beta1 * s.mW[k] + (1.0 - cfg.beta1) * g.dW[k];
        s.vW[k] = cfg.beta2 * s.vW[k] + (1.0 - cfg.beta2) * g.dW[k].cwiseProduct(g.dW[k]);
        s.W[k] -= cfg.lr * (s.mW[k] / c1)
                      .cwiseQuotient((s.vW[k] / c2).cwiseSqrt() +
                                     Matrix::Constant(s.W[k].rows(), s.W[k].cols(), cfg.eps));
        s.mb[k] = cfg.beta1 * s.mb[k] + (1.0 - cfg.beta1) * g.db[k];
        s.vb[k] = cfg.beta2 * s.vb[k] + (1.0 - cfg.beta2) * g.db[k].cwiseProduct(g.db[k]);
        s.b[k] -= cfg.lr * (s.mb[k] / c1)
                      .cwiseQuotient((s.vb[k] / c2).cwiseSqrt() +
                                     Vector::Constant(s.b[k].size(), cfg.eps));
    }
}

struct GradientCheckReport {
    struct Block {
        std::string name;
        double max_rel_error = 0.0;
        int checked = 0;
    };
    std::vector<Block> blocks;
    double max_rel_error = 0.0;
    bool passed = false;
};

/// Central finite differences against an arbitrary scalar loss of the
/// parameters. Checks a strided subset of each block (all of it when the
/// block is small). rel errors use an absolute floor of 1e-6.
template <typename LossFn>
GradientCheckReport gradient_check(MLPState &state, const MLPConfig &cfg, LossFn &&loss,
                                   const MLPGrads &analytic, double tol,
                                   int max_per_block = 40, double h = 1e-4) {
    GradientCheckReport report;
    auto check_entry = [&](double &param, double grad) {
        double saved = param;
        param = saved + h;
        double lp = loss();
        param = saved - h;
        double lm = loss();
        param = saved;
        double fd = (lp - lm) / (2.0 * h);
        double denom = std::max({std::abs(fd), std::abs(grad), 1e-6});
        return std::abs(fd - grad) / denom;
    };

    for (int k = 0; k < cfg.depth; ++k) {
        GradientCheckReport::Block wb{"W" + std::to_string(k), 0.0, 0};
        Eigen::Index total = state.W[k].size();
        Eigen::Index stride = std::max<Eigen::Index>(1, total / max_per_block);
        for (Eigen::Index i = 0; i < total; i += stride) {
            double e = check_entry(state.W[k].data()[i], analytic.dW[k].data()[i]);
            wb.max_rel_error = std::max(wb.max_rel_error, e);
            ++wb.checked;
        }
        report.blocks.push_back(wb);

        GradientCheckReport::Block bb{"b" + std::to_string(k), 0.0, 0};
        total = state.b[k].size();
        stride = std::max<Eigen::Index>(1, total / max_per_block);
        for (Eigen::Index i = 0; i < total; i += stride) {
            double e = check_entry(state.b[k].data()[i], analytic.db[k].data()[i]);
            bb.max_rel_error = std::max(bb.max_rel_error, e);
            ++bb.checked;
        }
        report.blocks.push_back(bb);
    }
    for (const auto &blk : report.blocks)
        report.max_rel_error = std::max(report.max_rel_error, blk.max_rel_error);
    report.passed = report.max_rel_error < tol;
    return report;
}

// ---------------------------------------------------------------------------
// Checkpoint serialization: little-endian binary, header then raw parameter
// blocks in declaration order. See README for the layout.

namespace io {

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

inline void write_u32(std::ostream &os, std::uint32_t v) {
    os.write(reinterpret_cast<const char *>(&v), 4);
}
inline void write_u64(std::ostream &os, std::uint64_t v) {
    os.write(reinterpret_cast<const char *>(&v), 8);
}
inline void write_f64(std::ostream &os, double v) {
    os.write(reinterpret_cast<const char *>(&v), 8);
}
inline std::uint32_t read_u32(std::istream &is) {
    std::uint32_t v;
    is.read(reinterpret_cast<char *>(&v), 4);
    return v;
}
inline std::uint64_t read_u64(std::istream &is) {
    std::uint64_t v;
    is.read(reinterpret_cast<char *>(&v), 8);
    return v;
}
inline double read_f64(std::istream &is) {
    double v;
    is.read(reinterpret_cast<char *>(&v), 8);
    return v;
}

}  // namespace io

inline void write_mlp(std::ostream &os, const MLPConfig &cfg, const MLPState &s) {
    io::write_u32(os, std::uint32_t(cfg.input_dim));
    io::write_u32(os, std::uint32_t(cfg.aux_dim));
    io::write_u32(os, std::uint32_t(cfg.width));
    io::write_u32(os, std::uint32_t(cfg.depth));
    io::write_u32(os, std::uint32_t(cfg.skip_layer + 1));  // store +1 so -1 fits unsigned
    io::write_u32(os, std::uint32_t(cfg.aux_layer));
    io::write_u32(os, std::uint32_t(cfg.output.size()));
    for (const auto &seg : cfg.output) {
        io::write_u32(os, std::uint32_t(seg.kind));
        io::write_u32(os, std::uint32_t(seg.count));
        io::write_f64(os, seg.scale);
        io::write_f64(os, seg.input_scale);
    }
    io::write_u64(os, std::uint64_t(s.step));
    for (int k = 0; k < cfg.depth; ++k) {
        os.write(reinterpret_cast<const char *>(s.W[k].data()), sizeof(double) * s.W[k].size());
        os.write(reinterpret_cast<const char *>(s.b[k].data()), sizeof(double) * s.b[k].size());
    }
}

inline void read_mlp(std::istream &is, MLPConfig &cfg, MLPState &s) {
    cfg.input_dim = int(io::read_u32(is));
    cfg.aux_dim = int(io::read_u32(is));
    cfg.width = int(io::read_u32(is));
    cfg.depth = int(io::read_u32(is));
    cfg.skip_layer = int(io::read_u32(is)) - 1;
    cfg.aux_layer = int(io::read_u32(is));
    std::uint32_t nseg = io::read_u32(is);
    cfg.output.clear();
    for (std::uint32_t i = 0; i < nseg; ++i) {
        OutputSegment seg;
        seg.kind = OutputKind(io::read_u32(is));
        seg.count = int(io::read_u32(is));
        seg.scale = io::read_f64(is);
        seg.input_scale = io::read_f64(is);
        cfg.output.push_back(seg);
    }
    if (!is) throw std::runtime_error("checkpoint: truncated MLP header");
    cfg.validate();
    s = MLPState();
    s.step = std::int64_t(io::read_u64(is));
    for (int k = 0; k < cfg.depth; ++k) {
        int in = cfg.layer_in(k), out = cfg.layer_out(k);
        Matrix w(out, in);
        Vector b(out);
        is.read(reinterpret_cast<char *>(w.data()), sizeof(double) * w.size());
        is.read(reinterpret_cast<char *>(b.data()), sizeof(double) * b.size());
        if (!is) throw std::runtime_error("checkpoint: truncated parameter block");
        s.W.push_back(std::move(w));
        s.b.push_back(std::move(b));
        s.mW.push_back(Matrix::Zero(out, in));
        s.vW.push_back(Matrix::Zero(out, in));
        s.mb.push_back(Vector::Zero(out));
        s.vb.push_back(Vector::Zero(out));
    }
}

}  // namespace brdflab
