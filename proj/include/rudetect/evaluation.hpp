// evaluation.hpp — confusion matrices, accuracy summaries, and the experiment
// runner that trains on a manifest's train split and scores its test split
// with and without mode-window smoothing.
#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "rudetect/common.hpp"
#include "rudetect/corpus.hpp"
#include "rudetect/labels.hpp"
#include "rudetect/mfcc.hpp"
#include "rudetect/smoothing.hpp"
#include "rudetect/svm.hpp"

namespace rudetect {

struct ConfusionMatrix {
    std::vector<std::vector<long long>> counts;  // [truth][pred]
    long long total = 0;
    int K() const { return static_cast<int>(counts.size()); }
};

inline ConfusionMatrix confusion(const LabelTrack& truth, const LabelTrack& pred, int K) {
    if (truth.size() != pred.size()) throw DataError("confusion: length mismatch");
    ConfusionMatrix cm;
    cm.counts.assign(K, std::vector<long long>(K, 0));
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const int a = truth[i], b = pred[i];
        if (a < 0 || a >= K || b < 0 || b >= K)
            throw DataError("confusion: class id out of range at frame " + std::to_string(i));
        ++cm.counts[a][b];
        ++cm.total;
    }
    return cm;
}

inline void accumulate(ConfusionMatrix& into, const ConfusionMatrix& part) {
    if (into.counts.empty()) {
        into = part;
        return;
    }
    if (into.K() != part.K()) throw DataError("confusion accumulate: K mismatch");
    for (int a = 0; a < part.K(); ++a)
        for (int b = 0; b < part.K(); ++b) into.counts[a][b] += part.counts[a][b];
    into.total += part.total;
}

// overall = trace/total; per_class[k] = diagonal over row sum (NaN for empty
// rows); rude = pooled accuracy over rows k >= 1.
struct AccuracySummary {
    double overall = 0.0;
    Vec per_class;
    double rude = std::numeric_limits<double>::quiet_NaN();
};

inline AccuracySummary accuracies(const ConfusionMatrix& cm) {
    if (cm.total <= 0) throw DataError("accuracies: empty confusion matrix");
    AccuracySummary s;
    long long trace = 0, rude_diag = 0, rude_total = 0;
    s.per_class.assign(cm.K(), std::numeric_limits<double>::quiet_NaN());
    for (int k = 0; k < cm.K(); ++k) {
        long long row = 0;
        for (int b = 0; b < cm.K(); ++b) row += cm.counts[k][b];
        trace += cm.counts[k][k];
        if (row > 0) s.per_class[k] = static_cast<double>(cm.counts[k][k]) / row;
        if (k >= 1) {
            rude_diag += cm.counts[k][k];
            rude_total += row;
        }
    }
    s.overall = static_cast<double>(trace) / cm.total;
    if (rude_total > 0) s.rude = static_cast<double>(rude_diag) / rude_total;
    return s;
}

// Normalized (by total) confusion matrix CSV, two decimals.
inline std::string confusion_csv(const ConfusionMatrix& cm) {
    std::string s = "truth";
    for (int b = 0; b < cm.K(); ++b) s += ",pred_" + std::to_string(b);
    s += "\n";
    char buf[32];
    for (int a = 0; a < cm.K(); ++a) {
        s += std::to_string(a);
        for (int b = 0; b < cm.K(); ++b) {
            std::snprintf(buf, sizeof buf, "%.2f",
                          cm.total ? static_cast<double>(cm.counts[a][b]) / cm.total : 0.0);
            s += std::string(",") + buf;
        }
        s += "\n";
    }
    return s;
}

// ---------------------------------------------------------------------------
// Experiment runner.

enum class Task { fourway, raised_tone, cascade, segmentation };

inline Task parse_task(const std::string& name) {
    if (name == "fourway") return Task::fourway;
    if (name == "raised-tone" || name == "raised_tone") return Task::raised_tone;
    if (name == "cascade") return Task::cascade;
    if (name == "segmentation") return Task::segmentation;
    throw DataError("unknown task: " + name);
}

struct ExperimentReport {
    std::string task;
    std::string kernel;  // "gaussian" | "polynomial" | "cascade"
    std::string param;   // gamma or degree as text; "-" for cascade
    int w = 30;
    ConfusionMatrix regular;
    ConfusionMatrix smoothed;
    bool converged = true;
};

struct TaskEntry {
    FrameFeatureTrack features;  // unscaled acceleration features
    LabelTrack labels;           // task labels, aligned to features
};

// Loads one manifest entry for a task: extract features, pick the task's
// label track, and for segmentation drop silence frames (label < 0).
inline TaskEntry load_task_entry(const ManifestEntry& e, Task task) {
    const AudioBuffer audio = load_wav(e.audio_path);
    const auto mfcc = extract_mfcc(audio);
    FrameFeatureTrack feats = acceleration_features(mfcc);

    std::string label_path = e.rude_labels_path;
    if (task == Task::segmentation) {
        if (e.segment_labels_path.empty())
            throw DataError("entry lacks segment labels: " + e.audio_path);
        label_path = e.segment_labels_path;
    }
    LabelTrack labels = read_label_csv(label_path);
    if (labels.size() != feats.frames.size())
        throw DataError("label track length " + std::to_string(labels.size()) +
                        " does not match frame count " + std::to_string(feats.frames.size()) +
                        " for " + e.audio_path);

    if (task == Task::raised_tone)
        for (auto& v : labels) v = v == kClassRaisedTone ? kClassRaisedTone : 0;
    if (task == Task::segmentation) {
        TaskEntry out;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] >= 0) {
                out.features.frames.push_back(std::move(feats.frames[i]));
                out.labels.push_back(labels[i]);
            }
        return out;
    }
    TaskEntry out;
    out.features = std::move(feats);
    out.labels = std::move(labels);
    return out;
}

inline std::vector<TaskEntry> load_task_split(const CorpusManifest& manifest, Task task,
                                              const std::string& split) {
    std::vector<TaskEntry> out;
    for (const auto& e : manifest.entries)
        if (e.split == split) out.push_back(load_task_entry(e, task));
    return out;
}

struct ExperimentConfig {
    KernelSpec spec;        // tier1 spec for cascade
    KernelSpec tier2_spec;  // cascade only
    TrainConfig train;
    int w = 30;
};

inline ExperimentReport run_experiment(const CorpusManifest& manifest, Task task,
                                       const ExperimentConfig& cfg) {
    std::vector<TaskEntry> train, test;
    for (const auto& e : manifest.entries)
        (e.split == "train" ? train : test).push_back(load_task_entry(e, task));
    if (train.empty()) throw DataError("manifest has no train entries");
    if (test.empty()) throw DataError("manifest has no test entries");

    std::vector<FrameFeatureTrack> train_feats;
    for (auto& e : train) train_feats.push_back(e.features);
    const ScalingBounds bounds = fit_scaling(train_feats);

    Mat X;
    std::vector<int> y;
    for (auto& e : train) {
        const auto scaled = apply_scaling(e.features, bounds);
        X.insert(X.end(), scaled.frames.begin(), scaled.frames.end());
        y.insert(y.end(), e.labels.begin(), e.labels.end());
    }

    SvmModel model;
    switch (task) {
        case Task::fourway: model = train_multiclass(X, y, cfg.spec, cfg.train); break;
        case Task::raised_tone: model = train_raised_tone(X, y, cfg.spec, cfg.train); break;
        case Task::cascade:
            model = train_cascade(X, y, cfg.spec, cfg.tier2_spec, cfg.train);
            break;
        case Task::segmentation: model = train_multiclass(X, y, cfg.spec, cfg.train); break;
    }

    const int K = task == Task::segmentation ? 3 : kNumRudenessClasses;
    ExperimentReport report;
    report.task = task == Task::fourway       ? "fourway"
                  : task == Task::raised_tone ? "raised_tone"
                  : task == Task::cascade     ? "cascade"
                                              : "segmentation";
    report.w = cfg.w;
    report.converged = model.converged();
    if (task == Task::cascade) {
        report.kernel = "cascade";
        report.param = "-";
    } else if (cfg.spec.kind == KernelKind::gaussian) {
        report.kernel = "gaussian";
        report.param = fmt9(cfg.spec.gamma);
    } else {
        report.kernel = "polynomial";
        report.param = std::to_string(cfg.spec.degree);
    }

    for (auto& e : test) {
        if (e.labels.empty()) continue;
        const auto scaled = apply_scaling(e.features, bounds);
        const LabelTrack pred = predict_track(model, scaled.frames);
        accumulate(report.regular, confusion(e.labels, pred, K));
        accumulate(report.smoothed, confusion(e.labels, smooth(pred, cfg.w), K));
    }
    if (report.regular.total == 0) throw DataError("test split produced no frames");
    return report;
}

// ---------------------------------------------------------------------------
// Report rendering: CSV rows `kernel,param,scope,regular_acc,smoothed_acc`
// (percent, 1 decimal) and a small text table.

namespace eval_detail {

inline std::string pct(double v) {
    if (std::isnan(v)) return "-";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", 100.0 * v);
    return buf;
}

inline std::vector<std::pair<std::string, std::pair<double, double>>> scope_rows(
    const ExperimentReport& r) {
    const AccuracySummary a = accuracies(r.regular);
    const AccuracySummary b = accuracies(r.smoothed);
    std::vector<std::pair<std::string, std::pair<double, double>>> rows;
    rows.push_back({"all", {a.overall, b.overall}});
    rows.push_back({"rude", {a.rude, b.rude}});
    for (int k = 0; k < static_cast<int>(a.per_class.size()); ++k) {
        std::string name = r.task == "segmentation"
                               ? (k == 0 ? "beginning" : k == 1 ? "middle" : "end")
                               : rudeness_class_name(k);
        rows.push_back({name, {a.per_class[k], b.per_class[k]}});
    }
    if (r.task == "segmentation") rows.erase(rows.begin() + 1);  // no rude scope
    return rows;
}

}  // namespace eval_detail

inline std::string report_csv(const std::vector<ExperimentReport>& reports) {
    std::string s = "kernel,param,scope,regular_acc,smoothed_acc\n";
    for (const auto& r : reports)
        for (const auto& [scope, acc] : eval_detail::scope_rows(r))
            s += r.kernel + "," + r.param + "," + scope + "," + eval_detail::pct(acc.first) +
                 "," + eval_detail::pct(acc.second) + "\n";
    return s;
}

inline std::string report_text(const ExperimentReport& r) {
    std::string s = "task=" + r.task + " kernel=" + r.kernel + " param=" + r.param +
                    " w=" + std::to_string(r.w) +
                    (r.converged ? "" : "  [warning: solver did not converge]") + "\n";
    char buf[96];
    std::snprintf(buf, sizeof buf, "%-14s %10s %10s\n", "scope", "regular", "smoothed");
    s += buf;
    for (const auto& [scope, acc] : eval_detail::scope_rows(r)) {
        std::snprintf(buf, sizeof buf, "%-14s %10s %10s\n", scope.c_str(),
                      eval_detail::pct(acc.first).c_str(), eval_detail::pct(acc.second).c_str());
        s += buf;
    }
    return s;
}

}  // namespace rudetect
