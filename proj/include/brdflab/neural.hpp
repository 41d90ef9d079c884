#pragma once

#include <optional>
#include <span>

#include "brdflab/angles.hpp"
#include "brdflab/mlp.hpp"
#include "brdflab/parametric.hpp"

namespace brdflab {

enum class ArchKind : std::uint32_t {
    ParamRP = 0,
    ParamTS = 1,
    ParamDisney = 2,
    SingleMLP = 3,
    AdditiveSeparate = 4,
    AdditiveShared = 5,
};

enum class ReciprocityMode : std::uint32_t { None = 0, RandomSwap = 1, Mapping = 2 };

enum class SpecChannels : std::uint32_t { RGB = 0, Scalar = 1 };

inline bool is_param_head(ArchKind k) {
    return k == ArchKind::ParamRP || k == ArchKind::ParamTS || k == ArchKind::ParamDisney;
}

inline bool is_additive(ArchKind k) {
    return k == ArchKind::AdditiveSeparate || k == ArchKind::AdditiveShared;
}

inline const char *arch_name(ArchKind k) {
    switch (k) {
        case ArchKind::ParamRP: return "param-rp";
        case ArchKind::ParamTS: return "param-ts";
        case ArchKind::ParamDisney: return "param-disney";
        case ArchKind::SingleMLP: return "single-mlp";
        case ArchKind::AdditiveSeparate: return "additive-separate";
        case ArchKind::AdditiveShared: return "additive-shared";
    }
    return "?";
}

/// Full description of one neural BRDF. dir_layers is the number of weight
/// layers the encoded directions pass through (the Table-2 ablation knob):
/// 6 for the single MLP (entering at layer 1), 4 for additive-separate's
/// specular MLP, 2 for the additive-shared specular head. Changing it moves
/// the angle entry layer (single MLP) or rebalances trunk/head depths
/// (additive models).
struct NeuralBRDFConfig {
    ArchKind kind = ArchKind::SingleMLP;
    ReciprocityMode reciprocity = ReciprocityMode::None;
    bool enhanced = false;
    SpecChannels spec_channels = SpecChannels::RGB;
    std::optional<std::pair<double, double>> albedo_clamp;  // on pi * f_d
    int dir_layers = -1;  // -1 = architecture default
    int pos_dim = 0;
    PositionalEncodingConfig angle_encoding{3, true};
    int width = 128;
    double softplus_scale = 0.5;  // additive specular heads; single MLP uses 1

    int angle_count() const { return reciprocity == ReciprocityMode::Mapping ? 4 : 3; }
    int angle_dim() const { return encoded_dim(angle_count(), angle_encoding); }

    int effective_dir_layers() const {
        if (dir_layers > 0) return dir_layers;
        switch (kind) {
            case ArchKind::SingleMLP: return 6;
            case ArchKind::AdditiveSeparate: return 4;
            case ArchKind::AdditiveShared: return 2;
            default: return 0;
        }
    }
};

/// One of the Fig.-2-style BRDF models: a parameter-prediction head over an
/// analytic model, a single direct MLP, or an additive diffuse+specular
/// split (separate MLPs or a shared trunk), optionally with the
/// reciprocity-mapped inputs and the enhanced (1-xi) combination.
struct NeuralBRDF {
    NeuralBRDFConfig cfg;
    std::vector<MLPConfig> mlp_cfg;
    std::vector<MLPState> mlp;

    // mlp index layout: param/single -> {net}; additive-separate ->
    // {diffuse, specular}; additive-shared -> {trunk, diffuse, specular}.

    std::int64_t parameter_count() const {
        std::int64_t n = 0;
        for (const auto &c : mlp_cfg) n += c.parameter_count();
        return n;
    }
};

namespace detail {

inline std::vector<OutputSegment> specular_output(const NeuralBRDFConfig &cfg) {
    std::vector<OutputSegment> out;
    out.push_back({OutputKind::Softplus, cfg.spec_channels == SpecChannels::Scalar ? 1 : 3,
                   cfg.softplus_scale, 1.0});
    if (cfg.enhanced) out.push_back({OutputKind::Sigmoid, 3, 1.0, 1.0});
    return out;
}

}  // namespace detail

inline NeuralBRDF build_neural_brdf(const NeuralBRDFConfig &cfg, std::uint64_t seed) {
    if (cfg.pos_dim <= 0) throw std::invalid_argument("build_neural_brdf: pos_dim not set");
    if (cfg.enhanced && !is_additive(cfg.kind))
        throw std::invalid_argument("build_neural_brdf: enhanced mode needs an additive split");

    NeuralBRDF model;
    model.cfg = cfg;
    const int w = cfg.width;
    const int dirs = cfg.effective_dir_layers();

    switch (cfg.kind) {
        case ArchKind::ParamRP:
        case ArchKind::ParamTS:
        case ArchKind::ParamDisney: {
            ParametricModel pm = cfg.kind == ArchKind::ParamRP ? ParametricModel::RealisticPhong
                                 : cfg.kind == ArchKind::ParamTS ? ParametricModel::TorranceSparrow
                                                                 : ParametricModel::Disney;
            MLPConfig net;
            net.input_dim = cfg.pos_dim;
            net.width = w;
            net.depth = 6;
            net.skip_layer = 2;
            net.output = {{OutputKind::Linear, param_arity(pm), 1.0, 1.0}};
            model.mlp_cfg = {net};
            break;
        }
        case ArchKind::SingleMLP: {
            MLPConfig net;
            net.input_dim = cfg.pos_dim;
            net.aux_dim = cfg.angle_dim();
            net.width = w;
            net.depth = 6;
            net.skip_layer = 2;
            net.aux_layer = std::clamp(net.depth - dirs, 0, net.depth - 1);
            net.output = {{OutputKind::Softplus, 3, 1.0, 1.0}};
            model.mlp_cfg = {net};
            break;
        }
        case ArchKind::AdditiveSeparate: {
            MLPConfig diff;
            diff.input_dim = cfg.pos_dim;
            diff.width = w;
            diff.depth = 4;
            diff.skip_layer = 1;
            diff.output = {{OutputKind::Sigmoid, 3, 1.0, 1.0}};

            MLPConfig spec;
            spec.input_dim = cfg.pos_dim;
            spec.aux_dim = cfg.angle_dim();
            spec.aux_layer = 0;
            spec.width = w;
            spec.depth = dirs;  // 4 by default; the 4->2 ablation drops the skip
            spec.skip_layer = spec.depth >= 3 ? 1 : -1;
            spec.output = detail::specular_output(cfg);
            model.mlp_cfg = {diff, spec};
            break;
        }
        case ArchKind::AdditiveShared: {
            MLPConfig trunk;
            trunk.input_dim = cfg.pos_dim;
            trunk.width = w;
            trunk.depth = std::max(1, 7 - dirs);  // 5 trunk + 2 head layers by default
            trunk.skip_layer = trunk.depth > 2 ? 2 : -1;
            trunk.output = {{OutputKind::Relu, w, 1.0, 1.0}};

            MLPConfig diff;
            diff.input_dim = w;
            diff.width = w;
            diff.depth = std::max(1, dirs - 1);
            diff.output = {{OutputKind::Sigmoid, 3, 1.0, 1.0}};

            MLPConfig spec;
            spec.input_dim = w;
            spec.aux_dim = cfg.angle_dim();
            spec.aux_layer = 0;
            spec.width = w;
            spec.depth = dirs;
            spec.output = detail::specular_output(cfg);
            model.mlp_cfg = {trunk, diff, spec};
            break;
        }
    }

    model.mlp.reserve(model.mlp_cfg.size());
    for (std::size_t i = 0; i < model.mlp_cfg.size(); ++i)
        model.mlp.push_back(init_mlp(model.mlp_cfg[i], splitmix64(seed + 0x9000 + i)));
    return model;
}

inline ParametricModel param_model_of(ArchKind k) {
    switch (k) {
        case ArchKind::ParamRP: return ParametricModel::RealisticPhong;
        case ArchKind::ParamTS: return ParametricModel::TorranceSparrow;
        case ArchKind::ParamDisney: return ParametricModel::Disney;
        default: throw std::logic_error("not a parametric head");
    }
}

// ---------------------------------------------------------------------------
// Angle features

/// Encoded direction features per the model's reciprocity mode. In mapping
/// mode the reciprocity-safe 4-tuple is computed straight from the
/// directions with swap-symmetric arithmetic, so downstream evaluation is
/// bit-identical under (v,l) exchange.
inline void angle_features_append(const NeuralBRDFConfig &cfg, const LocalFrame &frame,
                                  const Vec3 &v, const Vec3 &l, std::vector<double> &out) {
    if (cfg.reciprocity == ReciprocityMode::Mapping) {
        ReciprocalAngles a = reciprocal_from_dirs(frame, v, l);
        double vals[4] = {a.theta_h, a.theta_d, a.phi_d_mod_pi, a.phi_d_mod_pi_plus_pi};
        positional_encode_append(std::span<const double>(vals, 4), cfg.angle_encoding, out);
    } else {
        RusinkiewiczAngles a = rusinkiewicz_from_dirs(frame, v, l);
        double vals[3] = {a.theta_h, a.theta_d, a.phi_d};
        positional_encode_append(std::span<const double>(vals, 3), cfg.angle_encoding, out);
    }
}

inline std::vector<double> angle_features(const NeuralBRDFConfig &cfg, const LocalFrame &frame,
                                          const Vec3 &v, const Vec3 &l) {
    std::vector<double> out;
    out.reserve(cfg.angle_dim());
    angle_features_append(cfg, frame, v, l, out);
    return out;
}

/// Training-time reciprocity strategy applied to one sample's direction
/// pair: random_swap exchanges them with probability 1/2 from the given
/// stream; mapping and none leave the sample unchanged (mapping acts inside
/// angle_features instead).
inline void apply_reciprocity_strategy(ReciprocityMode mode, Vec3 &v, Vec3 &l, Rng &rng) {
    if (mode == ReciprocityMode::RandomSwap && rng.uniform() < 0.5) std::swap(v, l);
}

/// Channel-wise enhanced combination f = (1 - xi) * f_d + f_s (Eq.-8 style
/// split with the specular head's extra weight).
inline RGB enhanced_combine(const RGB &f_d, const RGB &f_s, const RGB &xi) {
    return {(1.0 - xi.r) * f_d.r + f_s.r, (1.0 - xi.g) * f_d.g + f_s.g,
            (1.0 - xi.b) * f_d.b + f_s.b};
}

// ---------------------------------------------------------------------------
// Batched forward/backward used by training and the audits.

/// Per-sample geometry needed by the analytic parameter heads.
struct SampleGeom {
    LocalFrame frame;
    Vec3 v, l;
};

struct NeuralForward {
    Matrix f;    // B x 3
    Matrix f_d;  // B x 3 (additive only)
    Matrix f_s;  // B x 3
    Matrix xi;   // B x 3 (enhanced only)

    std::vector<MLPTape> tapes;   // one per owned MLP
    Matrix head_out[3];           // raw post-activation outputs per MLP
    Matrix param_jac;             // param heads: B x (3*arity) d f / d raw
    Matrix albedo_mask;           // additive: 1 where the albedo clamp is inactive
};

namespace detail {

inline void spec_from_head(const NeuralBRDFConfig &cfg, const Matrix &head, Matrix &f_s,
                           Matrix &xi) {
    const Eigen::Index n = head.rows();
    f_s.resize(n, 3);
    if (cfg.spec_channels == SpecChannels::Scalar) {
        f_s.col(0) = head.col(0);
        f_s.col(1) = head.col(0);
        f_s.col(2) = head.col(0);
    } else {
        f_s = head.leftCols(3);
    }
    if (cfg.enhanced) {
        int off = cfg.spec_channels == SpecChannels::Scalar ? 1 : 3;
        xi = head.middleCols(off, 3);
    }
}

// gradient wrt the raw specular head from (df_s, dxi)
inline Matrix spec_head_grad(const NeuralBRDFConfig &cfg, const Matrix &df_s, const Matrix &dxi) {
    const Eigen::Index n = df_s.rows();
    int spec_cols = cfg.spec_channels == SpecChannels::Scalar ? 1 : 3;
    Matrix d(n, spec_cols + (cfg.enhanced ? 3 : 0));
    if (cfg.spec_channels == SpecChannels::Scalar)
        d.col(0) = df_s.rowwise().sum();
    else
        d.leftCols(3) = df_s;
    if (cfg.enhanced) d.rightCols(3) = dxi;
    return d;
}

}  // namespace detail

/// Batched model evaluation. x_pos: B x pos_dim point features; x_ang:
/// B x angle_dim encoded directions (ignored by parameter heads); geom:
/// required for parameter heads (one entry per row). Tapes are recorded for
/// neural_backward when `train` is set.
inline NeuralForward neural_forward(const NeuralBRDF &model, const Matrix &x_pos,
                                    const Matrix &x_ang, std::span<const SampleGeom> geom = {},
                                    bool train = false) {
    const auto &cfg = model.cfg;
    const Eigen::Index n = x_pos.rows();
    NeuralForward out;
    out.tapes.resize(model.mlp.size());
    MLPTape *t0 = train ? &out.tapes[0] : nullptr;

    if (is_param_head(cfg.kind)) {
        if (Eigen::Index(geom.size()) != n)
            throw std::invalid_argument("neural_forward: parameter heads need per-sample geometry");
        ParametricModel pm = param_model_of(cfg.kind);
        const int arity = param_arity(pm);
        Matrix raw = mlp_forward(model.mlp[0], model.mlp_cfg[0], x_pos, Matrix(), t0);
        out.head_out[0] = raw;
        out.f.resize(n, 3);
        if (train) out.param_jac.resize(n, 3 * arity);

        auto eval_one = [&](auto tag, Eigen::Index i) {
            constexpr int A = decltype(tag)::value;
            std::array<Dual<A>, A> draw;
            for (int a = 0; a < A; ++a) draw[a] = Dual<A>::variable(raw(i, a), a);
            TColor<Dual<A>> f;
            if constexpr (A == 7) {
                if (pm == ParametricModel::RealisticPhong)
                    f = eval_realistic_phong(activate_rp(draw.data()), geom[i].frame, geom[i].v,
                                             geom[i].l);
                else
                    f = eval_torrance_sparrow(activate_ts(draw.data()), geom[i].frame, geom[i].v,
                                              geom[i].l);
            } else {
                f = eval_disney_iso(activate_disney(draw.data()), geom[i].frame, geom[i].v,
                                    geom[i].l);
            }
            out.f(i, 0) = f.r.v;
            out.f(i, 1) = f.g.v;
            out.f(i, 2) = f.b.v;
            if (train)
                for (int a = 0; a < A; ++a) {
                    out.param_jac(i, 0 * A + a) = f.r.d[a];
                    out.param_jac(i, 1 * A + a) = f.g.d[a];
                    out.param_jac(i, 2 * A + a) = f.b.d[a];
                }
        };

        for (Eigen::Index i = 0; i < n; ++i) {
            if (arity == 7)
                eval_one(std::integral_constant<int, 7>{}, i);
            else
                eval_one(std::integral_constant<int, 12>{}, i);
        }
        return out;
    }

    if (cfg.kind == ArchKind::SingleMLP) {
        out.f = mlp_forward(model.mlp[0], model.mlp_cfg[0], x_pos, x_ang, t0);
        return out;
    }

    // additive models
    Matrix diff_raw, spec_raw;
    if (cfg.kind == ArchKind::AdditiveSeparate) {
        diff_raw = mlp_forward(model.mlp[0], model.mlp_cfg[0], x_pos, Matrix(), t0);
        spec_raw = mlp_forward(model.mlp[1], model.mlp_cfg[1], x_pos, x_ang,
                               train ? &out.tapes[1] : nullptr);
        out.head_out[0] = diff_raw;
        out.head_out[1] = spec_raw;
    } else {
        Matrix features = mlp_forward(model.mlp[0], model.mlp_cfg[0], x_pos, Matrix(), t0);
        out.head_out[0] = features;
        diff_raw = mlp_forward(model.mlp[1], model.mlp_cfg[1], features, Matrix(),
                               train ? &out.tapes[1] : nullptr);
        spec_raw = mlp_forward(model.mlp[2], model.mlp_cfg[2], features, x_ang,
                               train ? &out.tapes[2] : nullptr);
        out.head_out[1] = diff_raw;
        out.head_out[2] = spec_raw;
    }

    // albedo = sigmoid output, optionally clamped; f_d = albedo / pi
    out.f_d = diff_raw;
    out.albedo_mask = Matrix::Ones(n, 3);
    if (cfg.albedo_clamp) {
        auto [lo, hi] = *cfg.albedo_clamp;
        for (Eigen::Index i = 0; i < out.f_d.size(); ++i) {
            double a = out.f_d.data()[i];
            if (a <= lo || a >= hi) {
                out.f_d.data()[i] = std::clamp(a, lo, hi);
                out.albedo_mask.data()[i] = 0.0;
            }
        }
    }
    out.f_d *= kInvPi;

    detail::spec_from_head(cfg, spec_raw, out.f_s, out.xi);

    if (cfg.enhanced) {
        out.f = ((1.0 - out.xi.array()) * out.f_d.array() + out.f_s.array()).matrix();
    } else {
        out.f = out.f_d + out.f_s;
    }
    return out;
}

/// Gradients of a scalar loss through the batched forward. df is dLoss/df
/// (B x 3); df_d_extra and df_s_extra are optional direct gradients on the
/// split parts (the enhanced-mode regularizers). Returns one MLPGrads per
/// owned MLP, in the model's index order.
inline std::vector<MLPGrads> neural_backward(const NeuralBRDF &model, const NeuralForward &fwd,
                                             const Matrix &df, const Matrix *df_d_extra = nullptr,
                                             const Matrix *df_s_extra = nullptr) {
    const auto &cfg = model.cfg;
    const Eigen::Index n = df.rows();
    std::vector<MLPGrads> grads(model.mlp.size());

    if (is_param_head(cfg.kind)) {
        const int arity = param_arity(param_model_of(cfg.kind));
        Matrix draw(n, arity);
        for (Eigen::Index i = 0; i < n; ++i)
            for (int a = 0; a < arity; ++a)
                draw(i, a) = df(i, 0) * fwd.param_jac(i, 0 * arity + a) +
                             df(i, 1) * fwd.param_jac(i, 1 * arity + a) +
                             df(i, 2) * fwd.param_jac(i, 2 * arity + a);
        grads[0] = mlp_backward(model.mlp[0], model.mlp_cfg[0], fwd.tapes[0], draw);
        return grads;
    }

    if (cfg.kind == ArchKind::SingleMLP) {
        grads[0] = mlp_backward(model.mlp[0], model.mlp_cfg[0], fwd.tapes[0], df);
        return grads;
    }

    // additive: route df into the parts
    Matrix df_d, df_s, dxi;
    if (cfg.enhanced) {
        df_d = (df.array() * (1.0 - fwd.xi.array())).matrix();
        df_s = df;
        dxi = (-df.array() * fwd.f_d.array()).matrix();
    } else {
        df_d = df;
        df_s = df;
        dxi = Matrix::Zero(n, 3);
    }
    if (df_d_extra) df_d += *df_d_extra;
    if (df_s_extra) df_s += *df_s_extra;

    // through f_d = clamp(albedo)/pi
    Matrix d_diff_raw = (df_d.array() * fwd.albedo_mask.array() * kInvPi).matrix();
    Matrix d_spec_raw = detail::spec_head_grad(cfg, df_s, dxi);

    if (cfg.kind == ArchKind::AdditiveSeparate) {
        grads[0] = mlp_backward(model.mlp[0], model.mlp_cfg[0], fwd.tapes[0], d_diff_raw);
        grads[1] = mlp_backward(model.mlp[1], model.mlp_cfg[1], fwd.tapes[1], d_spec_raw);
    } else {
        grads[1] = mlp_backward(model.mlp[1], model.mlp_cfg[1], fwd.tapes[1], d_diff_raw);
        grads[2] = mlp_backward(model.mlp[2], model.mlp_cfg[2], fwd.tapes[2], d_spec_raw);
        Matrix d_features = grads[1].dx + grads[2].dx;
        grads[0] = mlp_backward(model.mlp[0], model.mlp_cfg[0], fwd.tapes[0], d_features);
    }
    return grads;
}

// ---------------------------------------------------------------------------
// Single-point evaluation for rendering and the physics audits.

struct EvalParts {
    RGB f, f_d, f_s, xi;
};

/// Evaluate the model at one surface point for many direction pairs; the
/// MLP work is batched. pos: the point's feature vector; parts may be null.
inline void eval_neural_batch(const NeuralBRDF &model, std::span<const double> pos,
                              const LocalFrame &frame, const Vec3 *vs, const Vec3 *ls,
                              std::size_t count, RGB *out, EvalParts *parts = nullptr) {
    const auto &cfg = model.cfg;
    if (int(pos.size()) != cfg.pos_dim)
        throw std::invalid_argument("eval_neural_batch: point feature width mismatch");

    if (is_param_head(cfg.kind)) {
        // position decides the parameters once; directions only touch the
        // analytic model
        Matrix x(1, cfg.pos_dim);
        for (int j = 0; j < cfg.pos_dim; ++j) x(0, j) = pos[j];
        Matrix raw = mlp_forward(model.mlp[0], model.mlp_cfg[0], x);
        std::vector<double> r(raw.cols());
        for (Eigen::Index j = 0; j < raw.cols(); ++j) r[j] = raw(0, j);
        ParametricParams params = activate_params(r, param_model_of(cfg.kind));
        for (std::size_t i = 0; i < count; ++i) {
            out[i] = eval_parametric(params, frame, vs[i], ls[i]);
            if (parts) parts[i] = {out[i], RGB{}, RGB{}, RGB{}};
        }
        return;
    }

    Matrix x_pos(count, cfg.pos_dim);
    Matrix x_ang(count, cfg.angle_dim());
    std::vector<double> feat;
    for (std::size_t i = 0; i < count; ++i) {
        for (int j = 0; j < cfg.pos_dim; ++j) x_pos(i, j) = pos[j];
        feat.clear();
        angle_features_append(cfg, frame, vs[i], ls[i], feat);
        for (int j = 0; j < cfg.angle_dim(); ++j) x_ang(i, j) = feat[j];
    }
    NeuralForward fwd = neural_forward(model, x_pos, x_ang);
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = {fwd.f(i, 0), fwd.f(i, 1), fwd.f(i, 2)};
        if (parts) {
            parts[i].f = out[i];
            if (is_additive(cfg.kind)) {
                parts[i].f_d = {fwd.f_d(i, 0), fwd.f_d(i, 1), fwd.f_d(i, 2)};
                parts[i].f_s = {fwd.f_s(i, 0), fwd.f_s(i, 1), fwd.f_s(i, 2)};
                if (cfg.enhanced) parts[i].xi = {fwd.xi(i, 0), fwd.xi(i, 1), fwd.xi(i, 2)};
            }
        }
    }
}

inline RGB eval_neural(const NeuralBRDF &model, std::span<const double> pos,
                       const LocalFrame &frame, const Vec3 &v, const Vec3 &l,
                       EvalParts *parts = nullptr) {
    RGB out;
    eval_neural_batch(model, pos, frame, &v, &l, 1, &out, parts);
    return out;
}

// ---------------------------------------------------------------------------
// Checkpoints: model descriptor followed by the MLP blocks.

inline constexpr char kCheckpointMagic[8] = {'B', 'L', 'A', 'B', 'C', 'K', 'P', '1'};

inline void save_neural_brdf(const std::string &path, const NeuralBRDF &model) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_neural_brdf: cannot open " + path);
    os.write(kCheckpointMagic, 8);
    io::write_u32(os, 1);  // version
    io::write_u32(os, std::uint32_t(model.cfg.kind));
    io::write_u32(os, std::uint32_t(model.cfg.reciprocity));
    io::write_u32(os, model.cfg.enhanced ? 1 : 0);
    io::write_u32(os, std::uint32_t(model.cfg.spec_channels));
    io::write_u32(os, model.cfg.albedo_clamp ? 1 : 0);
    io::write_f64(os, model.cfg.albedo_clamp ? model.cfg.albedo_clamp->first : 0.0);
    io::write_f64(os, model.cfg.albedo_clamp ? model.cfg.albedo_clamp->second : 0.0);
    io::write_u32(os, std::uint32_t(model.cfg.dir_layers + 1));
    io::write_u32(os, std::uint32_t(model.cfg.pos_dim));
    io::write_u32(os, std::uint32_t(model.cfg.angle_encoding.num_frequencies));
    io::write_u32(os, model.cfg.angle_encoding.include_raw ? 1 : 0);
    io::write_u32(os, std::uint32_t(model.cfg.width));
    io::write_f64(os, model.cfg.softplus_scale);
    io::write_u32(os, std::uint32_t(model.mlp.size()));
    for (std::size_t i = 0; i < model.mlp.size(); ++i)
        write_mlp(os, model.mlp_cfg[i], model.mlp[i]);
    if (!os) throw std::runtime_error("save_neural_brdf: write failed");
}

inline NeuralBRDF load_neural_brdf(const std::string &path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_neural_brdf: cannot open " + path);
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kCheckpointMagic, 8) != 0)
        throw std::runtime_error("load_neural_brdf: bad magic (not a checkpoint?)");
    std::uint32_t version = io::read_u32(is);
    if (version != 1) throw std::runtime_error("load_neural_brdf: unsupported version");

    NeuralBRDF model;
    model.cfg.kind = ArchKind(io::read_u32(is));
    model.cfg.reciprocity = ReciprocityMode(io::read_u32(is));
    model.cfg.enhanced = io::read_u32(is) != 0;
    model.cfg.spec_channels = SpecChannels(io::read_u32(is));
    bool clamp = io::read_u32(is) != 0;
    double lo = io::read_f64(is), hi = io::read_f64(is);
    if (clamp) model.cfg.albedo_clamp = {lo, hi};
    model.cfg.dir_layers = int(io::read_u32(is)) - 1;
    model.cfg.pos_dim = int(io::read_u32(is));
    model.cfg.angle_encoding.num_frequencies = int(io::read_u32(is));
    model.cfg.angle_encoding.include_raw = io::read_u32(is) != 0;
    model.cfg.width = int(io::read_u32(is));
    model.cfg.softplus_scale = io::read_f64(is);
    std::uint32_t count = io::read_u32(is);
    if (!is) throw std::runtime_error("load_neural_brdf: truncated header");
    model.mlp_cfg.resize(count);
    model.mlp.resize(count);
    for (std::uint32_t i = 0; i < count; ++i) read_mlp(is, model.mlp_cfg[i], model.mlp[i]);
    return model;
}

}  // namespace brdflab
