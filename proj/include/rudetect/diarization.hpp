// diarization.hpp — same/different speaker verification on pairs of feature
// windows (W_t, W_{t+gap}) and change-point decisions over a clip. Pairs sit
// on a stride-gap grid; the default geometry is M=10 frames (0.1 s windows)
// one second apart.
#pragma once

#include <algorithm>
#include <cstdlib>
#include <map>
#include <string>
#include <vector>

#include "rudetect/common.hpp"
#include "rudetect/labels.hpp"
#include "rudetect/mfcc.hpp"
#include "rudetect/mlp.hpp"
#include "rudetect/smoothing.hpp"

namespace rudetect {

inline constexpr int kDiarWindow = 10;   // M, frames
inline constexpr int kDiarGap = 100;     // 1 s at 10 ms hop

struct WindowPair {
    int t = 0;          // start frame of the first window
    Vec input;          // both windows concatenated, 2*M*12 values
    bool same = false;  // training label
};

namespace diar_detail {

inline Vec window_values(const FrameFeatureTrack& track, int start, int M) {
    Vec v;
    v.reserve(static_cast<std::size_t>(M) * kFeatureDim);
    for (int i = start; i < start + M; ++i)
        v.insert(v.end(), track.frames[i].begin(), track.frames[i].end());
    return v;
}

// Majority speaker of a window; returns false on an exact tie.
inline bool window_majority(const LabelTrack& speakers, int start, int M, int& winner) {
    std::map<int, int> counts;
    for (int i = start; i < start + M; ++i) ++counts[speakers[i]];
    int best = 0;
    bool tie = false;
    for (const auto& [id, c] : counts) {
        if (c > best) {
            best = c;
            winner = id;
            tie = false;
        } else if (c == best) {
            tie = true;
        }
    }
    return !tie;
}

}  // namespace diar_detail

// Labeled pairs for training. Pairs whose windows have no majority speaker
// (an exact tie across the boundary) are dropped.
inline std::vector<WindowPair> make_pairs(const FrameFeatureTrack& track,
                                          const LabelTrack& speakers, int M = kDiarWindow,
                                          int gap = kDiarGap) {
    const int len = static_cast<int>(track.frames.size());
    if (M < 1 || gap < 1) throw DataError("make_pairs: M and gap must be positive");
    if (speakers.size() != track.frames.size())
        throw DataError("make_pairs: speaker track length mismatch");
    if (len < gap + M) throw DataError("make_pairs: track shorter than gap + M frames");
    std::vector<WindowPair> pairs;
    for (int t = 0; t + gap + M <= len; t += gap) {
        int spk_a = 0, spk_b = 0;
        if (!diar_detail::window_majority(speakers, t, M, spk_a)) continue;
        if (!diar_detail::window_majority(speakers, t + gap, M, spk_b)) continue;
        WindowPair p;
        p.t = t;
        p.input = diar_detail::window_values(track, t, M);
        Vec tail = diar_detail::window_values(track, t + gap, M);
        p.input.insert(p.input.end(), tail.begin(), tail.end());
        p.same = spk_a == spk_b;
        pairs.push_back(std::move(p));
    }
    return pairs;
}

// Initializes a 2*M*12 -> 64 -> 32 -> 1 network and trains it; the output is
// the probability that both windows come from the same speaker.
inline MlpModel diarize_train(const std::vector<WindowPair>& pairs, int M, int epochs,
                              double learning_rate, long long seed) {
    if (pairs.empty()) throw DataError("diarize_train: no pairs");
    bool any_same = false, any_diff = false;
    Mat X;
    Vec y;
    for (const auto& p : pairs) {
        (p.same ? any_same : any_diff) = true;
        X.push_back(p.input);
        y.push_back(p.same ? 1.0 : 0.0);
    }
    if (!any_same || !any_diff)
        throw DataError("diarize_train: both same and different pairs are required");
    MlpModel model = mlp_init({2 * M * kFeatureDim, 64, 32, 1}, seed);
    return mlp_train(std::move(model), X, y, epochs, learning_rate, seed);
}

struct PairDecision {
    int pair_index = 0;
    int t = 0;            // start frame of the first window
    int t_ms = 0;         // representative change time: midpoint of the pair span
    double probability = 0.0;  // p(same), raw model output
    bool different = false;    // after thresholding and smoothing
};

struct DiarizationResult {
    std::vector<PairDecision> pairs;
    std::vector<int> change_frames;  // frame index per pair flagged different
};

// Thresholds p(same) per pair, mode-smooths the same/different sequence
// (w = 0 disables smoothing), and reports every pair whose smoothed decision
// is "different" as a change point.
inline DiarizationResult diarize_track(const MlpModel& model, const FrameFeatureTrack& track,
                                       int M = kDiarWindow, int gap = kDiarGap,
                                       double threshold = 0.5, int w = 0) {
    const int len = static_cast<int>(track.frames.size());
    if (M < 1 || gap < 1) throw DataError("diarize_track: M and gap must be positive");
    if (len < gap + M) throw DataError("diarize_track: track shorter than gap + M frames");

    DiarizationResult res;
    LabelTrack decisions;  // 0 = same, 1 = different (ties smooth toward same)
    for (int t = 0; t + gap + M <= len; t += gap) {
        PairDecision d;
        d.pair_index = static_cast<int>(res.pairs.size());
        d.t = t;
        d.t_ms = (t + (gap + M) / 2) * kHopMs;
        Vec input = diar_detail::window_values(track, t, M);
        Vec tail = diar_detail::window_values(track, t + gap, M);
        input.insert(input.end(), tail.begin(), tail.end());
        d.probability = mlp_forward(model, input);
        decisions.push_back(d.probability < threshold ? 1 : 0);
        res.pairs.push_back(d);
    }
    if (w > 0) decisions = smooth(decisions, w);
    for (std::size_t i = 0; i < res.pairs.size(); ++i) {
        res.pairs[i].different = decisions[i] == 1;
        if (res.pairs[i].different) res.change_frames.push_back(res.pairs[i].t_ms / kHopMs);
    }
    return res;
}

inline std::string changes_csv(const DiarizationResult& res) {
    std::string s = "pair_index,t_ms,probability,decision\n";
    for (const auto& p : res.pairs)
        s += std::to_string(p.pair_index) + "," + std::to_string(p.t_ms) + "," +
             fmt9(p.probability) + "," + (p.different ? "different" : "same") + "\n";
    return s;
}

// Frame accuracy of the per-frame "a change happens here" indicator, next to
// the absolute change-count error: rare-event accuracy is high even for a
// predictor that misses every change, which is exactly the point.
struct DiarizationReport {
    double frame_accuracy = 1.0;
    int count_error = 0;
};

inline DiarizationReport diarization_report(const std::vector<int>& truth_changes,
                                            const std::vector<int>& predicted_changes,
                                            int track_len) {
    if (track_len <= 0) throw DataError("diarization_report: track_len must be positive");
    std::vector<char> truth(track_len, 0), pred(track_len, 0);
    for (int f : truth_changes)
        if (f >= 0 && f < track_len) truth[f] = 1;
    for (int f : predicted_changes)
        if (f >= 0 && f < track_len) pred[f] = 1;
    int agree = 0;
    for (int i = 0; i < track_len; ++i) agree += truth[i] == pred[i];
    DiarizationReport r;
    r.frame_accuracy = static_cast<double>(agree) / track_len;
    r.count_error = std::abs(static_cast<int>(truth_changes.size()) -
                             static_cast<int>(predicted_changes.size()));
    return r;
}

}  // namespace rudetect
