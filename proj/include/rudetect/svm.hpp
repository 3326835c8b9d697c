// svm.hpp — kernel SVM with a simplified SMO dual solver, one-vs-one
// multiclass voting, the raised-tone binary variant, and the two-tier
// rude/not-rude cascade.
#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "rudetect/common.hpp"
#include "rudetect/labels.hpp"

namespace rudetect {

enum class KernelKind { gaussian, polynomial };

struct KernelSpec {
    KernelKind kind = KernelKind::gaussian;
    double gamma = 0.5;  // gaussian only
    int degree = 3;      // polynomial only
};

inline void validate_kernel(const KernelSpec& spec) {
    if (spec.kind == KernelKind::gaussian && spec.gamma <= 0.0)
        throw DataError("gaussian kernel needs gamma > 0");
    if (spec.kind == KernelKind::polynomial && spec.degree < 1)
        throw DataError("polynomial kernel needs degree >= 1");
}

inline double kernel_eval(const KernelSpec& spec, const Vec& x, const Vec& y) {
    if (x.size() != y.size()) throw DataError("kernel_eval: dimension mismatch");
    if (spec.kind == KernelKind::gaussian) {
        double d2 = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) d2 += (x[i] - y[i]) * (x[i] - y[i]);
        return std::exp(-spec.gamma * d2);
    }
    double dot = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * y[i];
    return std::pow(dot + 1.0, spec.degree);
}

struct TrainConfig {
    double C = 1.0;
    double tolerance = 1e-3;
    int max_passes = 100;  // total sweep budget for one SMO run
    long long seed = 0;
};

// One binary decision function f(z) = sum_i alpha_i y_i K(sv_i, z) + bias.
// f > 0 predicts pos_class, otherwise neg_class.
struct SvmMachine {
    Mat support_vectors;
    Vec dual_coeffs;  // alpha_i * y_i, nonzero
    double bias = 0.0;
    int neg_class = -1;
    int pos_class = +1;
    bool converged = true;

    double decision(const KernelSpec& spec, const Vec& z) const {
        double f = bias;
        for (std::size_t i = 0; i < support_vectors.size(); ++i)
            f += dual_coeffs[i] * kernel_eval(spec, support_vectors[i], z);
        return f;
    }
};

enum class SvmStructure { binary, one_vs_one, cascade };

struct SvmModel {
    KernelSpec kernel;
    SvmStructure structure = SvmStructure::binary;
    std::vector<int> classes;         // sorted ids this model can output
    std::vector<SvmMachine> machines; // 1 for binary; one per pair for one_vs_one
    std::unique_ptr<SvmModel> tier1, tier2;  // cascade only

    bool converged() const {
        for (const auto& m : machines)
            if (!m.converged) return false;
        if (tier1 && !tier1->converged()) return false;
        if (tier2 && !tier2->converged()) return false;
        return true;
    }
};

namespace svm_detail {

// Simplified SMO: sweep all indices, and for each KKT violator pick the
// second index at random (shuffled candidate order, first productive step
// wins). A sweep with no productive step means convergence; running out of
// the sweep budget leaves converged=false on the returned machine.
inline SvmMachine smo_train(const Mat& X, const std::vector<int>& y, const KernelSpec& spec,
                            const TrainConfig& cfg) {
    validate_kernel(spec);
    const int n = static_cast<int>(X.size());
    if (n < 2 || y.size() != X.size()) throw DataError("smo_train: need |X| = |y| >= 2");
    if (cfg.C <= 0.0 || cfg.tolerance <= 0.0 || cfg.max_passes <= 0)
        throw DataError("smo_train: C, tolerance, max_passes must be positive");
    bool has_pos = false, has_neg = false;
    for (int v : y) {
        if (v == 1) has_pos = true;
        else if (v == -1) has_neg = true;
        else throw DataError("smo_train: labels must be +/-1");
    }
    if (!has_pos || !has_neg) throw DataError("smo_train: both classes must be present");

    Mat K(n, Vec(n));
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) K[i][j] = K[j][i] = kernel_eval(spec, X[i], X[j]);

    Vec alpha(n, 0.0), F(n, 0.0);  // F[i] = f(x_i) under current alpha, bias
    double b = 0.0;
    const double C = cfg.C, tol = cfg.tolerance;

    std::seed_seq seq{cfg.seed};
    std::mt19937 rng(seq);
    std::vector<int> candidates(n);
    std::iota(candidates.begin(), candidates.end(), 0);

    auto take_step = [&](int i, int j) -> bool {
        if (i == j) return false;
        const double Ei = F[i] - y[i], Ej = F[j] - y[j];
        const double ai_old = alpha[i], aj_old = alpha[j];
        double L, H;
        if (y[i] != y[j]) {
            L = std::max(0.0, aj_old - ai_old);
            H = std::min(C, C + aj_old - ai_old);
        } else {
            L = std::max(0.0, ai_old + aj_old - C);
            H = std::min(C, ai_old + aj_old);
        }
        if (L >= H) return false;
        const double eta = 2.0 * K[i][j] - K[i][i] - K[j][j];
        if (eta >= 0.0) return false;
        double aj = aj_old - y[j] * (Ei - Ej) / eta;
        aj = std::clamp(aj, L, H);
        if (std::abs(aj - aj_old) < 1e-7) return false;
        const double ai = ai_old + y[i] * y[j] * (aj_old - aj);
        const double di = (ai - ai_old) * y[i], dj = (aj - aj_old) * y[j];
        const double b1 = b - Ei - di * K[i][i] - dj * K[i][j];
        const double b2 = b - Ej - di * K[i][j] - dj * K[j][j];
        double b_new;
        if (ai > 0.0 && ai < C)
            b_new = b1;
        else if (aj > 0.0 && aj < C)
            b_new = b2;
        else
            b_new = 0.5 * (b1 + b2);
        const double db = b_new - b;
        alpha[i] = ai;
        alpha[j] = aj;
        b = b_new;
        for (int t = 0; t < n; ++t) F[t] += di * K[i][t] + dj * K[j][t] + db;
        return true;
    };

    bool converged = false;
    for (int pass = 0; pass < cfg.max_passes && !converged; ++pass) {
        int changed = 0;
        for (int i = 0; i < n; ++i) {
            const double Ei = F[i] - y[i];
            const double r = y[i] * Ei;
            if (!((r < -tol && alpha[i] < C) || (r > tol && alpha[i] > 0.0))) continue;
            std::shuffle(candidates.begin(), candidates.end(), rng);
            for (int j : candidates)
                if (take_step(i, j)) {
                    ++changed;
                    break;
                }
        }
        if (changed == 0) converged = true;
    }

    SvmMachine m;
    m.bias = b;
    m.converged = converged;
    for (int i = 0; i < n; ++i)
        if (alpha[i] > 1e-12) {
            m.support_vectors.push_back(X[i]);
            m.dual_coeffs.push_back(alpha[i] * y[i]);
        }
    return m;
}

inline TrainConfig with_seed(const TrainConfig& cfg, long long salt) {
    TrainConfig c = cfg;
    c.seed = cfg.seed * 1000003 + salt;
    return c;
}

}  // namespace svm_detail

// Binary training on +/-1 labels; the resulting model reports classes {-1, +1}.
inline SvmModel train_binary(const Mat& X, const std::vector<int>& y, const KernelSpec& spec,
                             const TrainConfig& cfg) {
    SvmModel model;
    model.kernel = spec;
    model.structure = SvmStructure::binary;
    model.classes = {-1, 1};
    model.machines.push_back(svm_detail::smo_train(X, y, spec, cfg));
    return model;
}

// One binary machine per unordered class pair, trained on that pair's frames.
inline SvmModel train_multiclass(const Mat& X, const std::vector<int>& y, const KernelSpec& spec,
                                 const TrainConfig& cfg) {
    if (X.size() != y.size() || X.empty()) throw DataError("train_multiclass: need |X| = |y| > 0");
    std::vector<int> classes(y);
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    if (classes.size() < 2) throw DataError("train_multiclass: need at least 2 classes");

    SvmModel model;
    model.kernel = spec;
    model.structure = SvmStructure::one_vs_one;
    model.classes = classes;
    long long salt = 0;
    for (std::size_t a = 0; a < classes.size(); ++a)
        for (std::size_t bidx = a + 1; bidx < classes.size(); ++bidx) {
            Mat Xp;
            std::vector<int> yp;
            for (std::size_t i = 0; i < X.size(); ++i) {
                if (y[i] == classes[a]) {
                    Xp.push_back(X[i]);
                    yp.push_back(-1);
                } else if (y[i] == classes[bidx]) {
                    Xp.push_back(X[i]);
                    yp.push_back(+1);
                }
            }
            SvmMachine m = svm_detail::smo_train(Xp, yp, spec, svm_detail::with_seed(cfg, ++salt));
            m.neg_class = classes[a];
            m.pos_class = classes[bidx];
            model.machines.push_back(std::move(m));
        }
    return model;
}

// RaisedTone against everything else as one binary problem. The model's
// classes are {0, kClassRaisedTone}: 0 stands for "not raised".
inline SvmModel train_raised_tone(const Mat& X, const std::vector<int>& y, const KernelSpec& spec,
                                  const TrainConfig& cfg) {
    if (X.size() != y.size() || X.empty()) throw DataError("train_raised_tone: need |X| = |y| > 0");
    std::vector<int> mapped(y.size());
    bool any_pos = false, any_neg = false;
    for (std::size_t i = 0; i < y.size(); ++i) {
        mapped[i] = y[i] == kClassRaisedTone ? +1 : -1;
        (mapped[i] > 0 ? any_pos : any_neg) = true;
    }
    if (!any_pos) throw DataError("train_raised_tone: no raised-tone frames");
    if (!any_neg) throw DataError("train_raised_tone: no negative frames");
    SvmModel model = train_binary(X, mapped, spec, cfg);
    model.classes = {0, kClassRaisedTone};
    model.machines[0].neg_class = 0;
    model.machines[0].pos_class = kClassRaisedTone;
    return model;
}

// Tier 1 decides rude (1) vs not (0) on all frames; tier 2 separates the rude
// classes on rude frames only. With a single rude class present, tier 2 is a
// constant model with no machines.
inline SvmModel train_cascade(const Mat& X, const std::vector<int>& y, const KernelSpec& tier1_spec,
                              const KernelSpec& tier2_spec, const TrainConfig& cfg) {
    if (X.size() != y.size() || X.empty()) throw DataError("train_cascade: need |X| = |y| > 0");
    std::vector<int> rude_classes;
    bool any_none = false;
    for (int v : y) {
        if (v == kClassNone)
            any_none = true;
        else if (std::find(rude_classes.begin(), rude_classes.end(), v) == rude_classes.end())
            rude_classes.push_back(v);
    }
    if (!any_none) throw DataError("train_cascade: no class-0 frames");
    if (rude_classes.empty()) throw DataError("train_cascade: no rude frames");
    std::sort(rude_classes.begin(), rude_classes.end());

    std::vector<int> tier1_y(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) tier1_y[i] = y[i] == kClassNone ? -1 : +1;
    auto tier1 = std::make_unique<SvmModel>(
        train_binary(X, tier1_y, tier1_spec, svm_detail::with_seed(cfg, 1)));
    tier1->classes = {0, 1};  // markers: not rude / rude
    tier1->machines[0].neg_class = 0;
    tier1->machines[0].pos_class = 1;

    auto tier2 = std::make_unique<SvmModel>();
    tier2->kernel = tier2_spec;
    tier2->structure = SvmStructure::one_vs_one;
    tier2->classes = rude_classes;
    if (rude_classes.size() >= 2) {
        Mat Xr;
        std::vector<int> yr;
        for (std::size_t i = 0; i < y.size(); ++i)
            if (y[i] != kClassNone) {
                Xr.push_back(X[i]);
                yr.push_back(y[i]);
            }
        *tier2 = train_multiclass(Xr, yr, tier2_spec, svm_detail::with_seed(cfg, 2));
    }

    SvmModel model;
    model.kernel = tier1_spec;
    model.structure = SvmStructure::cascade;
    model.classes = {kClassNone};
    model.classes.insert(model.classes.end(), rude_classes.begin(), rude_classes.end());
    model.tier1 = std::move(tier1);
    model.tier2 = std::move(tier2);
    return model;
}

inline int predict_frame(const SvmModel& model, const Vec& z);

namespace svm_detail {

inline int predict_one_vs_one(const SvmModel& model, const Vec& z) {
    if (model.classes.size() == 1) return model.classes[0];  // constant model
    std::vector<int> votes(model.classes.size(), 0);
    auto class_index = [&model](int id) {
        return std::find(model.classes.begin(), model.classes.end(), id) - model.classes.begin();
    };
    for (const auto& m : model.machines) {
        const int winner = m.decision(model.kernel, z) > 0.0 ? m.pos_class : m.neg_class;
        ++votes[class_index(winner)];
    }
    int best = 0;
    for (std::size_t i = 1; i < votes.size(); ++i)
        if (votes[i] > votes[best]) best = static_cast<int>(i);  // ties keep lowest class id
    return model.classes[best];
}

}  // namespace svm_detail

inline int predict_frame(const SvmModel& model, const Vec& z) {
    switch (model.structure) {
        case SvmStructure::binary: {
            const auto& m = model.machines.at(0);
            return m.decision(model.kernel, z) > 0.0 ? m.pos_class : m.neg_class;
        }
        case SvmStructure::one_vs_one:
            return svm_detail::predict_one_vs_one(model, z);
        case SvmStructure::cascade: {
            const int tier1_out = predict_frame(*model.tier1, z);
            if (tier1_out == 0) return kClassNone;
            return predict_frame(*model.tier2, z);
        }
    }
    throw DataError("predict_frame: unknown model structure");
}

inline LabelTrack predict_track(const SvmModel& model, const Mat& frames) {
    LabelTrack out(frames.size());
    for (std::size_t i = 0; i < frames.size(); ++i) out[i] = predict_frame(model, frames[i]);
    return out;
}

// ---------------------------------------------------------------------------
// Model files: plain text. Binary machines carry their support vectors inline;
// one-vs-one and cascade models reference their part files by relative path.

namespace svm_detail {

inline std::string kernel_header(const KernelSpec& spec) {
    std::string s = "kernel=";
    s += spec.kind == KernelKind::gaussian ? "gaussian" : "polynomial";
    s += "\n";
    if (spec.kind == KernelKind::gaussian)
        s += "gamma=" + fmt9(spec.gamma) + "\n";
    else
        s += "degree=" + std::to_string(spec.degree) + "\n";
    return s;
}

inline std::string classes_line(const std::vector<int>& classes) {
    std::string s = "classes=";
    for (std::size_t i = 0; i < classes.size(); ++i)
        s += (i ? "," : "") + std::to_string(classes[i]);
    return s + "\n";
}

}  // namespace svm_detail

inline void save_svm_model(const std::string& path, const SvmModel& model) {
    using namespace svm_detail;
    std::string s = kernel_header(model.kernel);
    s += classes_line(model.classes);
    switch (model.structure) {
        case SvmStructure::binary: {
            const auto& m = model.machines.at(0);
            s += "bias=" + fmt9(m.bias) + "\n";
            s += "structure=binary\n";
            for (std::size_t i = 0; i < m.support_vectors.size(); ++i) {
                s += fmt9(m.dual_coeffs[i]);
                for (double v : m.support_vectors[i]) s += "," + fmt9(v);
                s += "\n";
            }
            break;
        }
        case SvmStructure::one_vs_one: {
            s += "structure=one_vs_one\n";
            const std::string stem = base_name(path);
            for (std::size_t i = 0; i < model.machines.size(); ++i) {
                const auto& m = model.machines[i];
                const std::string part =
                    stem + ".pair_" + std::to_string(m.neg_class) + "_" +
                    std::to_string(m.pos_class);
                SvmModel sub;
                sub.kernel = model.kernel;
                sub.structure = SvmStructure::binary;
                sub.classes = {m.neg_class, m.pos_class};
                sub.machines.push_back(m);
                save_svm_model(join_path(dir_of(path), part), sub);
                s += "machine=" + std::to_string(m.neg_class) + "," +
                     std::to_string(m.pos_class) + "," + part + "\n";
            }
            break;
        }
        case SvmStructure::cascade: {
            s += "structure=cascade\n";
            const std::string stem = base_name(path);
            save_svm_model(join_path(dir_of(path), stem + ".tier1"), *model.tier1);
            save_svm_model(join_path(dir_of(path), stem + ".tier2"), *model.tier2);
            s += "tier1=" + stem + ".tier1\n";
            s += "tier2=" + stem + ".tier2\n";
            break;
        }
    }
    write_text(path, s);
}

inline SvmModel load_svm_model(const std::string& path) {
    const auto lines = read_lines(path);
    SvmModel model;
    std::size_t ln = 0;
    auto expect_prefix = [&](const std::string& prefix) {
        if (ln >= lines.size() || lines[ln].rfind(prefix, 0) != 0)
            throw DataError("bad model file " + path + ": expected " + prefix);
        return lines[ln++].substr(prefix.size());
    };
    const std::string kind = expect_prefix("kernel=");
    if (kind == "gaussian") {
        model.kernel.kind = KernelKind::gaussian;
        model.kernel.gamma = parse_real(expect_prefix("gamma="), path);
    } else if (kind == "polynomial") {
        model.kernel.kind = KernelKind::polynomial;
        model.kernel.degree = static_cast<int>(parse_int(expect_prefix("degree="), path));
    } else {
        throw DataError("bad kernel kind in " + path);
    }
    validate_kernel(model.kernel);
    for (const auto& c : split(expect_prefix("classes="), ','))
        model.classes.push_back(static_cast<int>(parse_int(c, path)));
    if (model.classes.empty()) throw DataError("empty class list in " + path);

    std::string structure;
    if (ln < lines.size() && lines[ln].rfind("bias=", 0) == 0) {
        SvmMachine m;
        m.bias = parse_real(lines[ln++].substr(5), path);
        structure = expect_prefix("structure=");
        if (structure != "binary") throw DataError("bias= outside binary model in " + path);
        model.structure = SvmStructure::binary;
        if (model.classes.size() != 2) throw DataError("binary model needs 2 classes in " + path);
        m.neg_class = model.classes[0];
        m.pos_class = model.classes[1];
        for (; ln < lines.size(); ++ln) {
            if (trim(lines[ln]).empty()) continue;
            const auto f = split(lines[ln], ',');
            if (f.size() < 2) throw DataError("bad support vector line in " + path);
            m.dual_coeffs.push_back(parse_real(f[0], path));
            Vec sv(f.size() - 1);
            for (std::size_t i = 1; i < f.size(); ++i) sv[i - 1] = parse_real(f[i], path);
            m.support_vectors.push_back(std::move(sv));
        }
        model.machines.push_back(std::move(m));
        return model;
    }

    structure = expect_prefix("structure=");
    const std::string base = dir_of(path);
    if (structure == "one_vs_one") {
        model.structure = SvmStructure::one_vs_one;
        for (; ln < lines.size(); ++ln) {
            if (trim(lines[ln]).empty()) continue;
            if (lines[ln].rfind("machine=", 0) != 0)
                throw DataError("bad one_vs_one line in " + path);
            const auto f = split(lines[ln].substr(8), ',');
            if (f.size() != 3) throw DataError("bad machine= line in " + path);
            SvmModel part = load_svm_model(join_path(base, f[2]));
            if (part.structure != SvmStructure::binary)
                throw DataError("machine file is not binary in " + path);
            SvmMachine m = std::move(part.machines[0]);
            m.neg_class = static_cast<int>(parse_int(f[0], path));
            m.pos_class = static_cast<int>(parse_int(f[1], path));
            model.machines.push_back(std::move(m));
        }
        return model;
    }
    if (structure == "cascade") {
        model.structure = SvmStructure::cascade;
        model.tier1 = std::make_unique<SvmModel>(load_svm_model(join_path(base, expect_prefix("tier1="))));
        model.tier2 = std::make_unique<SvmModel>(load_svm_model(join_path(base, expect_prefix("tier2="))));
        return model;
    }
    throw DataError("unknown structure in " + path);
}

}  // namespace rudetect
