// rudetect — batch speech-and-text rudeness analysis over file-based stages:
// synthesize a corpus, extract features, train/apply the frame classifiers,
// smooth and score predictions, classify transcripts, diarize speakers, and
// cluster/project segmentation frames.
//
// Exit codes: 0 success, 1 usage error, 2 data/validation error, 3 numeric
// failure (solver non-convergence, non-finite loss).

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rudetect/common.hpp"
#include "rudetect/corpus.hpp"
#include "rudetect/diarization.hpp"
#include "rudetect/evaluation.hpp"
#include "rudetect/kmeans.hpp"
#include "rudetect/labels.hpp"
#include "rudetect/mfcc.hpp"
#include "rudetect/mlp.hpp"
#include "rudetect/naive_bayes.hpp"
#include "rudetect/projection.hpp"
#include "rudetect/smoothing.hpp"
#include "rudetect/svm.hpp"

namespace {

using namespace rudetect;

int g_exit = 0;
bool g_quiet = false;

void info(const std::string& msg) {
    if (!g_quiet) std::cout << msg << "\n";
}

KernelSpec make_kernel(const std::string& kind, double gamma, int degree) {
    KernelSpec spec;
    if (kind == "gaussian") {
        spec.kind = KernelKind::gaussian;
        spec.gamma = gamma;
    } else if (kind == "poly" || kind == "polynomial") {
        spec.kind = KernelKind::polynomial;
        spec.degree = degree;
    } else {
        throw DataError("unknown kernel: " + kind + " (expected gaussian or poly)");
    }
    validate_kernel(spec);
    return spec;
}

// Pooled, scaled training data for the SVM tasks, plus the bounds used.
struct PooledTraining {
    Mat X;
    std::vector<int> y;
    ScalingBounds bounds;
};

PooledTraining pool_training(const CorpusManifest& manifest, Task task) {
    const auto entries = load_task_split(manifest, task, "train");
    if (entries.empty()) throw DataError("manifest has no train entries");
    std::vector<FrameFeatureTrack> tracks;
    for (const auto& e : entries) tracks.push_back(e.features);
    PooledTraining out;
    out.bounds = fit_scaling(tracks);
    for (const auto& e : entries) {
        const auto scaled = apply_scaling(e.features, out.bounds);
        out.X.insert(out.X.end(), scaled.frames.begin(), scaled.frames.end());
        out.y.insert(out.y.end(), e.labels.begin(), e.labels.end());
    }
    return out;
}

// Speech frames (segment label >= 0) pooled over a manifest, with labels.
struct SpeechFrames {
    Mat X;
    std::vector<int> labels;
};

SpeechFrames pool_speech_frames(const CorpusManifest& manifest, const std::string& split) {
    SpeechFrames out;
    for (const auto& e : manifest.entries) {
        if (split != "all" && e.split != split) continue;
        const auto entry = load_task_entry(e, Task::segmentation);
        out.X.insert(out.X.end(), entry.features.frames.begin(), entry.features.frames.end());
        out.labels.insert(out.labels.end(), entry.labels.begin(), entry.labels.end());
    }
    if (out.X.empty()) throw DataError("no speech frames found for split " + split);
    return out;
}

std::vector<Transcript> split_transcripts(const CorpusManifest& manifest,
                                          const std::string& split) {
    std::vector<Transcript> out;
    for (const auto& e : manifest.entries) {
        if (split != "all" && e.split != split) continue;
        if (e.transcript_path.empty()) continue;
        out.push_back(read_transcript(e.transcript_path));
    }
    if (out.empty()) throw DataError("no transcripts found for split " + split);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rudetect: batch speech and text rudeness analysis toolkit"};
    app.require_subcommand(1);
    app.add_flag("--quiet", g_quiet, "suppress progress output");

    // ------------------------------------------------------------------ synth
    auto* synth = app.add_subcommand("synth", "generate a deterministic synthetic corpus");
    struct {
        std::string out;
        long long seed = 42;
        int clips = 10;
        double clip_seconds = 10.0;
        double gain_db = 12.0;
        double pitch = 1.3;
        std::vector<double> mix{0.7, 0.1, 0.1, 0.1};
    } synth_opt;
    synth->add_option("--out", synth_opt.out, "output directory")->required();
    synth->add_option("--seed", synth_opt.seed, "generator seed");
    synth->add_option("--clips", synth_opt.clips, "number of clips");
    synth->add_option("--clip-seconds", synth_opt.clip_seconds, "length of each clip");
    synth->add_option("--gain-db", synth_opt.gain_db, "raised-tone gain in dB");
    synth->add_option("--pitch-factor", synth_opt.pitch, "raised-tone pitch factor");
    synth->add_option("--mix", synth_opt.mix, "class mix: none,insult,raised,interruption")
        ->expected(4);
    synth->callback([&] {
        SynthesisSpec spec;
        spec.seed = synth_opt.seed;
        spec.n_clips = synth_opt.clips;
        spec.clip_seconds = synth_opt.clip_seconds;
        spec.raised_tone_gain_db = synth_opt.gain_db;
        spec.raised_tone_pitch_factor = synth_opt.pitch;
        for (int k = 0; k < 4; ++k) spec.class_mix[k] = synth_opt.mix[k];
        std::filesystem::create_directories(synth_opt.out);
        const auto manifest = generate_synthetic_corpus(spec, synth_opt.out);
        info("wrote " + std::to_string(manifest.entries.size()) + " clips and manifest to " +
             synth_opt.out);
    });

    // ---------------------------------------------------------------- extract
    auto* extract = app.add_subcommand("extract", "WAV to acceleration-feature CSV");
    struct {
        std::string in, out, bounds;
    } extract_opt;
    extract->add_option("--in", extract_opt.in, "input WAV")->required();
    extract->add_option("--out", extract_opt.out, "output feature CSV")->required();
    extract->add_option("--bounds", extract_opt.bounds, "apply scaling from a bounds CSV");
    extract->callback([&] {
        const AudioBuffer audio = load_wav(extract_opt.in);
        FrameFeatureTrack track = acceleration_features(extract_mfcc(audio));
        if (!extract_opt.bounds.empty())
            track = apply_scaling(track, read_bounds_csv(extract_opt.bounds));
        write_feature_csv(extract_opt.out, track);
        info("wrote " + std::to_string(track.frames.size()) + " frames to " + extract_opt.out);
    });

    // -------------------------------------------------------------- train-svm
    auto* train_svm = app.add_subcommand("train-svm", "train a frame classifier on a manifest");
    struct {
        std::string manifest, task, out;
        std::string kernel = "gaussian";
        double gamma = 0.5;
        int degree = 3;
        double C = 1.0;
        double tolerance = 1e-3;
        int max_passes = 100;
        long long seed = 42;
    } tsvm;
    train_svm->add_option("--manifest", tsvm.manifest, "corpus manifest")->required();
    train_svm->add_option("--task", tsvm.task, "fourway|raised-tone|cascade")->required();
    train_svm->add_option("--kernel", tsvm.kernel, "gaussian|poly");
    train_svm->add_option("--gamma", tsvm.gamma, "gaussian gamma");
    train_svm->add_option("--degree", tsvm.degree, "polynomial degree");
    train_svm->add_option("--C", tsvm.C, "soft-margin C");
    train_svm->add_option("--tolerance", tsvm.tolerance, "KKT tolerance");
    train_svm->add_option("--max-passes", tsvm.max_passes, "SMO sweep budget");
    train_svm->add_option("--seed", tsvm.seed, "solver seed");
    train_svm->add_option("--out", tsvm.out, "output model path")->required();
    train_svm->callback([&] {
        const Task task = parse_task(tsvm.task);
        if (task == Task::segmentation)
            throw DataError("use the segment subcommand for segmentation");
        const auto manifest = load_manifest(tsvm.manifest);
        const auto data = pool_training(manifest, task);
        const KernelSpec spec = make_kernel(tsvm.kernel, tsvm.gamma, tsvm.degree);
        TrainConfig cfg;
        cfg.C = tsvm.C;
        cfg.tolerance = tsvm.tolerance;
        cfg.max_passes = tsvm.max_passes;
        cfg.seed = tsvm.seed;
        SvmModel model;
        switch (task) {
            case Task::fourway: model = train_multiclass(data.X, data.y, spec, cfg); break;
            case Task::raised_tone: model = train_raised_tone(data.X, data.y, spec, cfg); break;
            case Task::cascade: model = train_cascade(data.X, data.y, spec, spec, cfg); break;
            default: break;
        }
        write_bounds_csv(tsvm.out + ".bounds", data.bounds);
        save_svm_model(tsvm.out, model);
        info("trained on " + std::to_string(data.X.size()) + " frames; model at " + tsvm.out);
        if (!model.converged()) {
            std::cerr << "warning: SMO did not converge within the sweep budget\n";
            g_exit = 3;
        }
    });

    // ------------------------------------------------------------ predict-svm
    auto* predict_svm = app.add_subcommand("predict-svm", "predict labels for a feature CSV");
    struct {
        std::string model, in, out, bounds;
    } psvm;
    predict_svm->add_option("--model", psvm.model, "model path")->required();
    predict_svm->add_option("--in", psvm.in, "feature CSV (unscaled)")->required();
    predict_svm->add_option("--out", psvm.out, "output label CSV")->required();
    predict_svm->add_option("--bounds", psvm.bounds, "scaling bounds (default <model>.bounds)");
    predict_svm->callback([&] {
        const SvmModel model = load_svm_model(psvm.model);
        const std::string bounds_path = psvm.bounds.empty() ? psvm.model + ".bounds" : psvm.bounds;
        const ScalingBounds bounds = read_bounds_csv(bounds_path);
        const FrameFeatureTrack track = apply_scaling(read_feature_csv(psvm.in), bounds);
        write_label_csv(psvm.out, predict_track(model, track.frames));
        info("wrote predictions to " + psvm.out);
    });

    // ------------------------------------------------------------------ smooth
    auto* smooth_cmd = app.add_subcommand("smooth", "mode-window smooth a label CSV");
    struct {
        std::string in, out;
        int window = 30;
    } smo;
    smooth_cmd->add_option("--in", smo.in, "input label CSV")->required();
    smooth_cmd->add_option("--window", smo.window, "window w (frames of context)");
    smooth_cmd->add_option("--out", smo.out, "output label CSV")->required();
    smooth_cmd->callback([&] {
        write_label_csv(smo.out, smooth(read_label_csv(smo.in), smo.window));
        info("smoothed " + smo.in + " with w=" + std::to_string(smo.window));
    });

    // ---------------------------------------------------------------- evaluate
    auto* evaluate = app.add_subcommand(
        "evaluate", "score predictions against truth, or run a manifest experiment");
    struct {
        std::string truth, pred, manifest, task, sweep;
        std::string kernel = "gaussian";
        double gamma = 0.5;
        int degree = 3;
        double C = 1.0;
        double tolerance = 1e-3;
        int max_passes = 100;
        long long seed = 42;
        int window = 30;
        int classes = kNumRudenessClasses;
        std::string out_report, out_confusion, out_confusion_smoothed;
    } ev;
    evaluate->add_option("--truth", ev.truth, "truth label CSV (file mode)");
    evaluate->add_option("--pred", ev.pred, "predicted label CSV (file mode)");
    evaluate->add_option("--classes", ev.classes, "class count for file mode");
    evaluate->add_option("--manifest", ev.manifest, "corpus manifest (experiment mode)");
    evaluate->add_option("--task", ev.task, "fourway|raised-tone|cascade|segmentation");
    evaluate->add_option("--kernel", ev.kernel, "gaussian|poly");
    evaluate->add_option("--gamma", ev.gamma, "gaussian gamma");
    evaluate->add_option("--degree", ev.degree, "polynomial degree");
    evaluate->add_option("--C", ev.C, "soft-margin C");
    evaluate->add_option("--tolerance", ev.tolerance, "KKT tolerance");
    evaluate->add_option("--max-passes", ev.max_passes, "SMO sweep budget");
    evaluate->add_option("--seed", ev.seed, "solver seed");
    evaluate->add_option("--window", ev.window, "smoothing window w");
    evaluate->add_option("--sweep", ev.sweep, "table3: run all six kernel settings");
    evaluate->add_option("--out-report", ev.out_report, "report CSV path");
    evaluate->add_option("--out-confusion", ev.out_confusion, "confusion CSV (regular)");
    evaluate->add_option("--out-confusion-smoothed", ev.out_confusion_smoothed,
                         "confusion CSV (smoothed)");
    evaluate->callback([&] {
        if (ev.manifest.empty()) {
            if (ev.truth.empty() || ev.pred.empty())
                throw DataError("evaluate needs either --manifest or --truth and --pred");
            const LabelTrack truth = read_label_csv(ev.truth);
            const LabelTrack pred = read_label_csv(ev.pred);
            const ConfusionMatrix cm = confusion(truth, pred, ev.classes);
            const AccuracySummary acc = accuracies(cm);
            char buf[64];
            std::snprintf(buf, sizeof buf, "overall %s", eval_detail::pct(acc.overall).c_str());
            std::cout << buf << "\n";
            std::snprintf(buf, sizeof buf, "rude %s", eval_detail::pct(acc.rude).c_str());
            std::cout << buf << "\n";
            for (std::size_t k = 0; k < acc.per_class.size(); ++k)
                std::cout << "class_" << k << " " << eval_detail::pct(acc.per_class[k]) << "\n";
            if (!ev.out_confusion.empty()) write_text(ev.out_confusion, confusion_csv(cm));
            return;
        }
        if (ev.task.empty()) throw DataError("experiment mode needs --task");
        const Task task = parse_task(ev.task);
        const auto manifest = load_manifest(ev.manifest);
        ExperimentConfig cfg;
        cfg.train.C = ev.C;
        cfg.train.tolerance = ev.tolerance;
        cfg.train.max_passes = ev.max_passes;
        cfg.train.seed = ev.seed;
        cfg.w = ev.window;

        std::vector<KernelSpec> specs;
        if (ev.sweep.empty()) {
            specs.push_back(make_kernel(ev.kernel, ev.gamma, ev.degree));
        } else if (ev.sweep == "table3") {
            for (double g : {0.05, 0.5, 1.0}) specs.push_back(make_kernel("gaussian", g, 0));
            for (int d : {1, 3, 6}) specs.push_back(make_kernel("poly", 0.0, d));
        } else {
            throw DataError("unknown sweep: " + ev.sweep);
        }

        std::vector<ExperimentReport> reports;
        bool all_converged = true;
        for (const auto& spec : specs) {
            cfg.spec = spec;
            cfg.tier2_spec = spec;
            reports.push_back(run_experiment(manifest, task, cfg));
            std::cout << report_text(reports.back());
            all_converged = all_converged && reports.back().converged;
        }
        if (!ev.out_report.empty()) write_text(ev.out_report, report_csv(reports));
        if (!ev.out_confusion.empty()) {
            if (reports.size() == 1)
                write_text(ev.out_confusion, confusion_csv(reports[0].regular));
            else
                std::cerr << "note: --out-confusion ignored in sweep mode\n";
        }
        if (!ev.out_confusion_smoothed.empty()) {
            if (reports.size() == 1)
                write_text(ev.out_confusion_smoothed, confusion_csv(reports[0].smoothed));
            else
                std::cerr << "note: --out-confusion-smoothed ignored in sweep mode\n";
        }
        if (!all_converged) {
            std::cerr << "warning: SMO did not converge within the sweep budget\n";
            g_exit = 3;
        }
    });

    // ---------------------------------------------------------------- train-nb
    auto* train_nb_cmd = app.add_subcommand("train-nb", "train the transcript classifier");
    struct {
        std::string manifest, out;
        double alpha = 1.0;
    } tnb;
    train_nb_cmd->add_option("--manifest", tnb.manifest, "corpus manifest")->required();
    train_nb_cmd->add_option("--alpha", tnb.alpha, "smoothing pseudo-count (0 disables)");
    train_nb_cmd->add_option("--out", tnb.out, "output model path")->required();
    train_nb_cmd->callback([&] {
        const auto manifest = load_manifest(tnb.manifest);
        const auto transcripts = split_transcripts(manifest, "train");
        const NbModel model = train_nb(transcripts, tnb.alpha);
        save_nb_model(tnb.out, model);
        info("vocabulary of " + std::to_string(model.vocab.size()) + " words; model at " + tnb.out);
    });

    // -------------------------------------------------------------- classify-nb
    auto* classify_nb_cmd = app.add_subcommand("classify-nb", "classify transcript phrases");
    struct {
        std::string model, in, out;
    } cnb;
    classify_nb_cmd->add_option("--model", cnb.model, "NB model path")->required();
    classify_nb_cmd->add_option("--in", cnb.in, "transcript TSV")->required();
    classify_nb_cmd->add_option("--out", cnb.out, "output CSV")->required();
    classify_nb_cmd->callback([&] {
        const NbModel model = load_nb_model(cnb.model);
        const Transcript transcript = read_transcript(cnb.in);
        std::string s = "index,label,p_rude,p_not_rude\n";
        int correct = 0;
        for (std::size_t i = 0; i < transcript.size(); ++i) {
            const Posterior p = posterior(model, phrase_vector(model, transcript[i].text));
            const bool rude = !p.both_zero && p.p_rude > p.p_not_rude;
            s += std::to_string(i) + "," + (rude ? "rude" : "not_rude") + "," + fmt9(p.p_rude) +
                 "," + fmt9(p.p_not_rude) + "\n";
            correct += rude == transcript[i].rude;
        }
        write_text(cnb.out, s);
        char buf[64];
        std::snprintf(buf, sizeof buf, "accuracy %.1f on %zu phrases",
                      100.0 * correct / static_cast<double>(transcript.size()),
                      transcript.size());
        info(buf);
    });

    // ------------------------------------------------------------ diarize-train
    auto* diar_train = app.add_subcommand("diarize-train", "train the same-speaker network");
    struct {
        std::string manifest, out;
        int M = kDiarWindow;
        int gap = kDiarGap;
        int epochs = 150;
        double lr = 0.5;
        long long seed = 42;
    } dt;
    diar_train->add_option("--manifest", dt.manifest, "corpus manifest")->required();
    diar_train->add_option("--M", dt.M, "window length in frames");
    diar_train->add_option("--gap", dt.gap, "pair gap in frames");
    diar_train->add_option("--epochs", dt.epochs, "training epochs");
    diar_train->add_option("--lr", dt.lr, "learning rate");
    diar_train->add_option("--seed", dt.seed, "init/shuffle seed");
    diar_train->add_option("--out", dt.out, "output model path")->required();
    diar_train->callback([&] {
        const auto manifest = load_manifest(dt.manifest);
        std::vector<WindowPair> pairs;
        for (const auto& e : manifest.entries) {
            if (e.split != "train") continue;
            if (e.speaker_labels_path.empty())
                throw DataError("entry lacks speaker labels: " + e.audio_path);
            const AudioBuffer audio = load_wav(e.audio_path);
            const FrameFeatureTrack track = acceleration_features(extract_mfcc(audio));
            const LabelTrack speakers = read_label_csv(e.speaker_labels_path);
            auto entry_pairs = make_pairs(track, speakers, dt.M, dt.gap);
            pairs.insert(pairs.end(), entry_pairs.begin(), entry_pairs.end());
        }
        const MlpModel model = diarize_train(pairs, dt.M, dt.epochs, dt.lr, dt.seed);
        save_mlp_model(dt.out, model);
        info("trained on " + std::to_string(pairs.size()) + " pairs; model at " + dt.out);
    });

    // -------------------------------------------------------------- diarize-run
    auto* diar_run = app.add_subcommand("diarize-run", "detect speaker changes in a WAV");
    struct {
        std::string model, in, out;
        int M = kDiarWindow;
        int gap = kDiarGap;
        double threshold = 0.5;
        int window = 0;
    } dr;
    diar_run->add_option("--model", dr.model, "MLP model path")->required();
    diar_run->add_option("--in", dr.in, "input WAV")->required();
    diar_run->add_option("--M", dr.M, "window length in frames");
    diar_run->add_option("--gap", dr.gap, "pair gap in frames");
    diar_run->add_option("--threshold", dr.threshold, "same-speaker probability threshold");
    diar_run->add_option("--window", dr.window, "smoothing window (0 = off)");
    diar_run->add_option("--out", dr.out, "output changes CSV")->required();
    diar_run->callback([&] {
        const MlpModel model = load_mlp_model(dr.model);
        const AudioBuffer audio = load_wav(dr.in);
        const FrameFeatureTrack track = acceleration_features(extract_mfcc(audio));
        const DiarizationResult res =
            diarize_track(model, track, dr.M, dr.gap, dr.threshold, dr.window);
        write_text(dr.out, changes_csv(res));
        std::string msg = std::to_string(res.change_frames.size()) + " change(s)";
        for (const auto& p : res.pairs)
            if (p.different) msg += " at " + std::to_string(p.t_ms) + "ms";
        info(msg);
    });

    // ------------------------------------------------------------------ segment
    auto* segment = app.add_subcommand("segment", "train and score sentence segmentation");
    struct {
        std::string manifest, out_report;
        std::string kernel = "gaussian";
        double gamma = 0.5;
        int degree = 3;
        double C = 1.0;
        double tolerance = 1e-3;
        int max_passes = 100;
        long long seed = 42;
        int window = 15;
    } sg;
    segment->add_option("--manifest", sg.manifest, "corpus manifest")->required();
    segment->add_option("--kernel", sg.kernel, "gaussian|poly");
    segment->add_option("--gamma", sg.gamma, "gaussian gamma");
    segment->add_option("--degree", sg.degree, "polynomial degree");
    segment->add_option("--C", sg.C, "soft-margin C");
    segment->add_option("--tolerance", sg.tolerance, "KKT tolerance");
    segment->add_option("--max-passes", sg.max_passes, "SMO sweep budget");
    segment->add_option("--seed", sg.seed, "solver seed");
    segment->add_option("--window", sg.window, "smoothing window w");
    segment->add_option("--out-report", sg.out_report, "report CSV path");
    segment->callback([&] {
        const auto manifest = load_manifest(sg.manifest);
        ExperimentConfig cfg;
        cfg.spec = make_kernel(sg.kernel, sg.gamma, sg.degree);
        cfg.train.C = sg.C;
        cfg.train.tolerance = sg.tolerance;
        cfg.train.max_passes = sg.max_passes;
        cfg.train.seed = sg.seed;
        cfg.w = sg.window;
        const ExperimentReport report = run_experiment(manifest, Task::segmentation, cfg);
        std::cout << report_text(report);
        if (!sg.out_report.empty()) write_text(sg.out_report, report_csv({report}));
        if (!report.converged) {
            std::cerr << "warning: SMO did not converge within the sweep budget\n";
            g_exit = 3;
        }
    });

    // ------------------------------------------------------------------ cluster
    auto* cluster = app.add_subcommand("cluster", "K-means over speech frames");
    struct {
        std::string manifest, out;
        std::string split = "all";
        int K = 3;
        int max_iter = 100;
        long long seed = 42;
        bool constrained = false;
    } cl;
    cluster->add_option("--manifest", cl.manifest, "corpus manifest")->required();
    cluster->add_option("--split", cl.split, "all|train|test");
    cluster->add_option("--K", cl.K, "cluster count");
    cluster->add_option("--max-iter", cl.max_iter, "Lloyd iteration cap");
    cluster->add_option("--seed", cl.seed, "seeding seed");
    cluster->add_flag("--constrained", cl.constrained,
                      "force cluster sizes to the segment-label proportions");
    cluster->add_option("--out", cl.out, "output assignment CSV")->required();
    cluster->callback([&] {
        const auto manifest = load_manifest(cl.manifest);
        const SpeechFrames data = pool_speech_frames(manifest, cl.split);
        ClusterResult result = kmeans(data.X, cl.K, cl.seed, cl.max_iter);
        if (cl.constrained) {
            if (cl.K != 3)
                throw DataError("--constrained needs K=3 (one quota per segment class)");
            // Quotas equal the segment-label counts over these same points, so
            // the proportions are matched exactly and sum to N by construction.
            std::vector<int> quotas(3, 0);
            for (int v : data.labels) ++quotas[v];
            result.assignments = constrained_assign(data.X, result.centroids, quotas);
        }
        std::string s = "index,cluster_id,segment_class\n";
        for (std::size_t i = 0; i < result.assignments.size(); ++i)
            s += std::to_string(i) + "," + std::to_string(result.assignments[i]) + "," +
                 std::to_string(data.labels[i]) + "\n";
        write_text(cl.out, s);
        info("objective " + fmt9(result.objective) + " over " +
             std::to_string(result.assignments.size()) + " frames");
    });

    // ------------------------------------------------------------------ project
    auto* project = app.add_subcommand("project", "2-D projection of speech frames");
    struct {
        std::string manifest, out, svg;
        std::string method;
        std::string split = "all";
        double perplexity = 30.0;
        int iters = 1000;
        long long seed = 42;
        int max_points = 600;
    } pj;
    project->add_option("--manifest", pj.manifest, "corpus manifest")->required();
    project->add_option("--method", pj.method, "pca|tsne")->required();
    project->add_option("--split", pj.split, "all|train|test");
    project->add_option("--out", pj.out, "output CSV")->required();
    project->add_option("--svg", pj.svg, "also write an SVG scatter");
    project->add_option("--perplexity", pj.perplexity, "t-SNE perplexity");
    project->add_option("--iters", pj.iters, "t-SNE iterations");
    project->add_option("--seed", pj.seed, "t-SNE seed");
    project->add_option("--max-points", pj.max_points,
                        "evenly subsample to at most this many frames (0 = no cap)");
    project->callback([&] {
        const auto manifest = load_manifest(pj.manifest);
        SpeechFrames data = pool_speech_frames(manifest, pj.split);
        if (pj.max_points > 0 && static_cast<int>(data.X.size()) > pj.max_points) {
            const std::size_t stride =
                (data.X.size() + pj.max_points - 1) / static_cast<std::size_t>(pj.max_points);
            SpeechFrames sub;
            for (std::size_t i = 0; i < data.X.size(); i += stride) {
                sub.X.push_back(std::move(data.X[i]));
                sub.labels.push_back(data.labels[i]);
            }
            data = std::move(sub);
        }
        Projection proj;
        if (pj.method == "pca") {
            proj = pca_project(data.X, 2);
            std::string msg = "explained ratios:";
            for (double r : proj.explained) msg += " " + fmt9(r);
            info(msg);
        } else if (pj.method == "tsne") {
            proj = tsne_project(data.X, pj.perplexity, pj.iters, pj.seed);
            info("KL " + fmt9(proj.kl_initial) + " -> " + fmt9(proj.kl_final) +
                 (proj.jitter_applied ? " (duplicate points jittered)" : ""));
        } else {
            throw DataError("unknown method: " + pj.method + " (expected pca or tsne)");
        }
        write_text(pj.out, projection_csv(proj, data.labels));
        if (!pj.svg.empty()) write_text(pj.svg, projection_svg(proj, data.labels));
    });

    // Let flags like --quiet appear after the subcommand name too.
    for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; }))
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
        std::cerr << e.what() << "\nrun with --help for usage\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    }
    return g_exit;
}
