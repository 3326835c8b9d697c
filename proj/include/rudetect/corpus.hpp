// corpus.hpp — dataset layer: manifests, transcripts, and the deterministic
// synthetic corpus generator used for all desk-scale experiments.
//
// Generated audio is speech-like harmonic bursts from two synthetic speakers
// with disjoint pitch, vibrato-rate, and spectral-centroid ranges. Rudeness
// classes map onto the rendering as follows:
//   0 None          plain phrase
//   1 VerbalInsult  audio identical in distribution to None; only the paired
//                   transcript line differs (labeled rude)
//   2 RaisedTone    gain raised by raised_tone_gain_db, pitch scaled by
//                   raised_tone_pitch_factor, and — because the acceleration
//                   features are invariant to a constant gain — vibrato and
//                   envelope wobble scaled up with the pitch factor so the
//                   class is separable from spectral dynamics
//   3 Interruption  a second voice overlaps the tail of the previous phrase;
//                   only the overlap frames carry the label
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "rudetect/audio.hpp"
#include "rudetect/common.hpp"
#include "rudetect/labels.hpp"
#include "rudetect/mfcc.hpp"

namespace rudetect {

struct ManifestEntry {
    std::string audio_path;
    std::string rude_labels_path;
    std::string segment_labels_path;  // empty if absent
    std::string speaker_labels_path;  // empty if absent
    std::string transcript_path;      // empty if absent
    std::string split;                // "train" or "test"
};

struct CorpusManifest {
    std::vector<ManifestEntry> entries;
};

struct TranscriptPhrase {
    bool rude = false;
    std::string text;
};
using Transcript = std::vector<TranscriptPhrase>;

struct SynthesisSpec {
    long long seed = 0;
    int n_clips = 10;
    double clip_seconds = 10.0;
    int sample_rate = kSampleRate;  // fixed; anything else is rejected
    double raised_tone_gain_db = 12.0;
    double raised_tone_pitch_factor = 1.3;
    std::array<double, 4> class_mix{0.7, 0.1, 0.1, 0.1};
};

// ---------------------------------------------------------------------------
// Manifest I/O. Lines are `audio<TAB>rude<TAB>seg<TAB>spk<TAB>transcript<TAB>split`
// with `-` marking an absent optional field. Relative paths are resolved
// against the manifest's own directory on load.

inline void write_manifest(const std::string& path, const CorpusManifest& m) {
    auto field = [](const std::string& s) { return s.empty() ? std::string("-") : s; };
    std::string out;
    for (const auto& e : m.entries) {
        out += e.audio_path + "\t" + e.rude_labels_path + "\t" + field(e.segment_labels_path) +
               "\t" + field(e.speaker_labels_path) + "\t" + field(e.transcript_path) + "\t" +
               e.split + "\n";
    }
    write_text(path, out);
}

inline CorpusManifest load_manifest(const std::string& path) {
    if (!file_exists(path)) throw DataError("manifest not found: " + path);
    const std::string base = dir_of(path);
    auto resolve = [&base](const std::string& p) {
        if (p.empty() || p == "-") return std::string();
        if (!p.empty() && p[0] == '/') return p;
        return join_path(base, p);
    };
    CorpusManifest m;
    const auto lines = read_lines(path);
    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
        if (trim(lines[ln]).empty()) continue;
        const std::string where = path + ":" + std::to_string(ln + 1);
        const auto f = split(lines[ln], '\t');
        if (f.size() != 6) throw DataError("manifest entry needs 6 tab-separated fields (" + where + ")");
        ManifestEntry e;
        e.audio_path = resolve(f[0]);
        e.rude_labels_path = resolve(f[1]);
        e.segment_labels_path = resolve(f[2]);
        e.speaker_labels_path = resolve(f[3]);
        e.transcript_path = resolve(f[4]);
        e.split = f[5];
        if (e.audio_path.empty()) throw DataError("manifest entry missing audio path (" + where + ")");
        if (e.rude_labels_path.empty())
            throw DataError("manifest entry missing rudeness labels (" + where + ")");
        if (e.split != "train" && e.split != "test")
            throw DataError("manifest split must be train or test (" + where + ")");
        for (const std::string* p :
             {&e.audio_path, &e.rude_labels_path, &e.segment_labels_path, &e.speaker_labels_path,
              &e.transcript_path})
            if (!p->empty() && !file_exists(*p))
                throw DataError("manifest references missing file " + *p + " (" + where + ")");
        m.entries.push_back(std::move(e));
    }
    return m;
}

// ---------------------------------------------------------------------------
// Transcript I/O: one `label<TAB>text` line per phrase, label rude|not_rude.

inline void write_transcript(const std::string& path, const Transcript& t) {
    std::string out;
    for (const auto& p : t)
        out += std::string(p.rude ? "rude" : "not_rude") + "\t" + p.text + "\n";
    write_text(path, out);
}

inline Transcript read_transcript(const std::string& path) {
    Transcript t;
    const auto lines = read_lines(path);
    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
        if (trim(lines[ln]).empty()) continue;
        const std::string where = path + ":" + std::to_string(ln + 1);
        const auto f = split(lines[ln], '\t');
        if (f.size() != 2) throw DataError("transcript line needs label<TAB>text (" + where + ")");
        TranscriptPhrase p;
        if (f[0] == "rude")
            p.rude = true;
        else if (f[0] == "not_rude")
            p.rude = false;
        else
            throw DataError("transcript label must be rude or not_rude (" + where + ")");
        p.text = trim(f[1]);
        if (p.text.empty()) throw DataError("empty transcript text (" + where + ")");
        t.push_back(std::move(p));
    }
    return t;
}

// Accuracy of always predicting the modal class.
inline double majority_baseline(const std::vector<LabelTrack>& tracks) {
    std::vector<long long> counts;
    long long total = 0;
    for (const auto& t : tracks)
        for (int c : t) {
            if (c < 0) throw DataError("majority_baseline: negative class id");
            if (static_cast<std::size_t>(c) >= counts.size()) counts.resize(c + 1, 0);
            ++counts[c];
            ++total;
        }
    if (total == 0) throw DataError("majority_baseline: no labels");
    return static_cast<double>(*std::max_element(counts.begin(), counts.end())) / total;
}

// ---------------------------------------------------------------------------
// Synthetic generator internals.

namespace synth_detail {

// Loud enough that voice onsets climb out of the hum over several frames of
// the amplitude ramp instead of jumping off the log floor in one.
inline constexpr double kNoiseAmp = 0.01;  // -40 dB re full scale
inline constexpr int kMinPhraseFrames = 12;
inline constexpr int kRampSamples = 2400;  // 150 ms attack/release
inline constexpr int kAmpBlock = 16;      // samples between envelope updates

struct SpeakerProfile {
    double f0_lo, f0_hi;
    double vib_rate_lo, vib_rate_hi;
    double vib_depth_lo, vib_depth_hi;
    double wob_rate_lo, wob_rate_hi;
    double wob_depth_lo, wob_depth_hi;
    double tex_rate_lo, tex_rate_hi;  // fast timbre tremor, Hz
    double tex_amp_lo, tex_amp_hi;    // its centroid amplitude, Hz
    double cen_lo, cen_hi;
};

// Static voice differences (pitch, timbre) are differentiated away by the
// acceleration features, so each voice also carries a fast timbre tremor
// whose strength is characteristic of the speaker. Each voice's parameters
// are fixed rather than drawn per phrase: what varies between phrases is
// loudness, length, and the phases of the oscillators, so a speaker's
// windows form a tight family that a verification model can actually cover
// from a modest corpus. The tremor rate of 12.5 Hz repeats every 8 frames,
// which keeps that family small. Loudness variation is free variety: a
// uniform gain moves only the constant cepstral coefficient, which the
// acceleration features drop.
inline const SpeakerProfile& speaker_profile(int id) {
    static const SpeakerProfile profiles[2] = {
        {118.0, 118.0, 4.5, 4.5, 0.001, 0.001, 1.6, 1.6, 0.003, 0.003,
         12.5, 12.5, 14.0, 14.0, 1100.0, 1100.0},
        {212.0, 212.0, 6.4, 6.4, 0.009, 0.009, 3.0, 3.0, 0.011, 0.011,
         12.5, 12.5, 147.0, 147.0, 2100.0, 2100.0},
    };
    return profiles[id & 1];
}

struct PhraseParams {
    double f0, amp;
    double vib_rate, vib_depth;
    double wob_rate, wob_depth, wob_phase;
    double tex_rate, tex_amp, tex_phase;  // fast speaker-texture tremor
    double centroid, sigma;
    double rough_depth;          // fractional f0 jitter, 0 for calm voices
    double cen_rough_hz;         // centroid jitter amplitude in Hz, 0 for calm voices
    double sig_rough;            // fractional envelope-width jitter, 0 for calm voices
    double agi_rate, agi_phase;  // agitation oscillator (raised-tone only)
    double agi_cen_hz, agi_sig;  // its centre/width amplitudes, 0 for calm voices
    std::uint32_t rough_seed;    // private stream so roughness stays per-phrase
    std::array<double, 16> phases;
};

// All parameters are drawn for every phrase in a fixed order so the RNG
// consumption — and therefore the audio of every later phrase — does not
// depend on the class assignment. The raised-tone adjustments are applied
// afterwards only when the phrase is actually a RaisedTone one.
inline PhraseParams draw_phrase_params(std::mt19937& rng, int speaker) {
    const SpeakerProfile& sp = speaker_profile(speaker);
    auto uni = [&rng](double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    };
    PhraseParams p;
    p.f0 = uni(sp.f0_lo, sp.f0_hi);
    p.amp = uni(0.12, 0.18);
    p.vib_rate = uni(sp.vib_rate_lo, sp.vib_rate_hi);
    p.vib_depth = uni(sp.vib_depth_lo, sp.vib_depth_hi);
    p.wob_rate = uni(sp.wob_rate_lo, sp.wob_rate_hi);
    p.wob_depth = uni(sp.wob_depth_lo, sp.wob_depth_hi);
    p.wob_phase = uni(0.0, 2.0 * kPi);
    p.tex_rate = uni(sp.tex_rate_lo, sp.tex_rate_hi);
    p.tex_amp = uni(sp.tex_amp_lo, sp.tex_amp_hi);
    p.tex_phase = uni(0.0, 2.0 * kPi);
    p.centroid = uni(sp.cen_lo, sp.cen_hi);
    p.sigma = uni(450.0, 450.0);
    p.rough_depth = 0.0;
    p.cen_rough_hz = 0.0;
    p.sig_rough = 0.0;
    p.agi_rate = uni(11.0, 17.0);
    p.agi_phase = uni(0.0, 2.0 * kPi);
    p.agi_cen_hz = 0.0;
    p.agi_sig = 0.0;
    p.rough_seed = static_cast<std::uint32_t>(
        std::uniform_int_distribution<std::uint32_t>()(rng));
    // Schroeder phases: deterministic, low crest factor, and — because
    // neighbouring harmonics always interfere identically — a band spectrum
    // that depends only on the voice parameters, not on a per-phrase draw.
    for (std::size_t k = 0; k < p.phases.size(); ++k)
        p.phases[k] = kPi * static_cast<double>(k * k) / static_cast<double>(p.phases.size());
    return p;
}

inline void apply_raised_tone(PhraseParams& p, double gain_db, double pitch_factor) {
    const double excess = pitch_factor - 1.0;
    p.f0 *= pitch_factor;
    p.amp *= std::pow(10.0, gain_db / 20.0);
    p.vib_depth += 0.02 * excess;
    p.vib_rate += 10.0 * excess;
    p.wob_depth += 0.05 * excess;
    p.wob_rate += 10.0 * excess;
    p.rough_depth = 0.01 * excess;
    // Agitation: the envelope centre and width oscillate in quadrature, so the
    // spectral trajectory loops instead of swinging through still points — its
    // second derivative never vanishes anywhere in a raised phrase. Amplitudes
    // scale with the envelope width so low- and high-centroid voices are
    // agitated equally strongly.
    p.agi_cen_hz = 4.0 * excess * p.sigma;
    p.agi_sig = 1.33 * excess;
}

// Additively renders one harmonic burst over samples [start, end).
inline void render_voice(Vec& samples, const PhraseParams& p, long long start, long long end) {
    const long long n = end - start;
    if (n <= 0) return;
    const int nharm = std::max(1, std::min(16, static_cast<int>(3600.0 / p.f0)));
    std::array<double, 16> phase{}, amp{};
    for (int k = 0; k < nharm; ++k) phase[k] = p.phases[k];
    // Piecewise-linear jitter tracks updated every kRoughBlock samples; zero
    // depths leave the voice purely sinusoidal. The width track's knots are
    // offset by half a block from the centre track's so their flat (low
    // second-derivative) stretches never coincide.
    std::mt19937 rough_rng(p.rough_seed);
    std::uniform_real_distribution<double> rough_dist(-1.0, 1.0);
    constexpr int kRoughBlock = 320;
    double rough_cur = rough_dist(rough_rng), rough_next = rough_dist(rough_rng);
    double wrough_cur = rough_dist(rough_rng), wrough_next = rough_dist(rough_rng);
    for (long long i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / kSampleRate;
        if (i > 0 && i % kRoughBlock == 0) {
            rough_cur = rough_next;
            rough_next = rough_dist(rough_rng);
        }
        if (i > 0 && (i + kRoughBlock / 2) % kRoughBlock == 0) {
            wrough_cur = wrough_next;
            wrough_next = rough_dist(rough_rng);
        }
        const double rough = rough_cur + (rough_next - rough_cur) *
                                             static_cast<double>(i % kRoughBlock) / kRoughBlock;
        const double wrough =
            wrough_cur + (wrough_next - wrough_cur) *
                             static_cast<double>((i + kRoughBlock / 2) % kRoughBlock) / kRoughBlock;
        if (i % kAmpBlock == 0) {
            const double agi = 2.0 * kPi * p.agi_rate * t + p.agi_phase;
            const double cen =
                p.centroid * (1.0 + p.wob_depth * std::sin(2.0 * kPi * p.wob_rate * t + p.wob_phase)) +
                p.tex_amp * std::sin(2.0 * kPi * p.tex_rate * t + p.tex_phase) +
                p.cen_rough_hz * rough + p.agi_cen_hz * std::sin(agi);
            const double sig = p.sigma * std::max(0.25, 1.0 + p.sig_rough * 0.3 * wrough +
                                                            p.agi_sig * std::cos(agi));
            double norm = 0.0;
            for (int k = 0; k < nharm; ++k) {
                const double fk = (k + 1) * p.f0;
                amp[k] = std::exp(-(fk - cen) * (fk - cen) / (2.0 * sig * sig));
                norm += amp[k];
            }
            double ramp = 1.0;
            if (i < kRampSamples) ramp = static_cast<double>(i) / kRampSamples;
            const long long from_end = n - 1 - i;
            if (from_end < kRampSamples)
                ramp = std::min(ramp, static_cast<double>(from_end) / kRampSamples);
            const double scale = norm > 0.0 ? p.amp * ramp / norm : 0.0;
            for (int k = 0; k < nharm; ++k) amp[k] *= scale;
        }
        const double f_inst = p.f0 * (1.0 + p.vib_depth * std::sin(2.0 * kPi * p.vib_rate * t) +
                                      p.rough_depth * rough);
        double v = 0.0;
        for (int k = 0; k < nharm; ++k) {
            v += amp[k] * std::sin(phase[k]);
            phase[k] += 2.0 * kPi * (k + 1) * f_inst / kSampleRate;
        }
        samples[start + i] += v;
    }
}

struct Slot {
    int gap_before = 0;  // silence frames preceding the slot, layout-time
    int len = 0;         // frames; 0 means the slot was dropped
    int cls = kClassNone;
    int speaker = 0;
    int start = 0;  // frame index, filled in during rendering
};

}  // namespace synth_detail

// Result of rendering one clip entirely in memory (also used by tests).
struct RenderedClip {
    AudioBuffer audio;
    LabelTrack rude;
    LabelTrack segment;
    LabelTrack speaker;
    Transcript transcript;
};

namespace synth_detail {

inline const std::vector<std::string>& neutral_words() {
    static const std::vector<std::string> w = {
        "the",     "we",      "need",    "to",      "review",  "project", "report",  "meeting",
        "today",   "plan",    "update",  "team",    "should",  "discuss", "budget",  "before",
        "deadline", "please",  "check",   "numbers", "again",   "next",    "week",    "schedule"};
    return w;
}

inline const std::vector<std::string>& insult_words() {
    static const std::vector<std::string> w = {"stupid", "idiot",    "moron", "fool",  "dumb",
                                               "useless", "pathetic", "clown", "loser", "ridiculous"};
    return w;
}

inline std::string make_sentence(std::mt19937& rng, bool rude) {
    auto pick = [&rng](const std::vector<std::string>& v) {
        return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
    };
    const int n_neutral = std::uniform_int_distribution<int>(4, 8)(rng);
    std::vector<std::string> words;
    for (int i = 0; i < n_neutral; ++i) words.push_back(pick(neutral_words()));
    if (rude) {
        const int n_insult = std::uniform_int_distribution<int>(1, 3)(rng);
        for (int i = 0; i < n_insult; ++i) {
            const std::size_t pos =
                std::uniform_int_distribution<std::size_t>(0, words.size())(rng);
            words.insert(words.begin() + static_cast<std::ptrdiff_t>(pos), pick(insult_words()));
        }
    }
    std::string s;
    for (std::size_t i = 0; i < words.size(); ++i) s += (i ? " " : "") + words[i];
    return s;
}

// Renders one clip from its slot plan. Slots of class Interruption are glued
// to the end of the previous phrase, whose voice keeps sounding through the
// overlap; the displaced gap is re-inserted afterwards.
inline RenderedClip render_clip(const SynthesisSpec& spec, long long clip_index,
                                std::vector<Slot> slots, int total_frames,
                                long long n_samples) {
    std::seed_seq seq{static_cast<long long>(spec.seed), clip_index};
    std::mt19937 rng(seq);

    RenderedClip clip;
    clip.audio.sample_rate = kSampleRate;
    clip.audio.samples.assign(n_samples, 0.0);

    // Final frame positions, with interruption slots glued to their
    // predecessor and the displaced silence pushed behind them.
    int cursor = 0, pending_gap = 0;
    std::vector<Slot*> live;
    for (auto& s : slots) {
        if (s.len == 0) {
            pending_gap += s.gap_before;
            continue;
        }
        if (s.cls == kClassInterruption && !live.empty()) {
            pending_gap += s.gap_before;
            s.start = cursor;
        } else {
            s.start = cursor + s.gap_before + pending_gap;
            pending_gap = 0;
        }
        cursor = s.start + s.len;
        live.push_back(&s);
    }

    // Background hum: one sinusoid per mel band, at the band's centre, with
    // per-clip phases. A lone sinusoid has a time-constant magnitude spectrum,
    // so unlike white noise — or several components beating inside one band —
    // the hum's band energies do not fluctuate at all, and silence is truly
    // still. It also lifts silence well above the log floor so voice onsets
    // climb gently instead of jumping. While anyone speaks the hum is pulled
    // down, the way a recording chain's auto-gain would duck it, so the faint
    // beating between voice harmonics and hum components does not tint the
    // voiced texture.
    {
        Vec voicing(static_cast<std::size_t>(n_samples), 0.0);
        for (const Slot* s : live) {
            const long long s0 = static_cast<long long>(s->start) * kHopLen;
            const long long s1 = std::min<long long>(
                n_samples, static_cast<long long>(s->start + s->len - 1) * kHopLen + kFrameLen);
            for (long long i = s0; i < s1; ++i) {
                double ramp = std::min<double>(1.0, static_cast<double>(i - s0) / kRampSamples);
                ramp = std::min(ramp, std::min<double>(1.0, static_cast<double>(s1 - 1 - i) /
                                                               kRampSamples));
                voicing[i] = std::min(1.0, voicing[i] + ramp);
            }
        }
        constexpr int kHumComponents = 26;
        constexpr double kDuck = 0.85;
        const double mel_hi = hz_to_mel(8000.0);
        const double comp_amp = kNoiseAmp / std::sqrt(static_cast<double>(kHumComponents));
        std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * kPi);
        std::array<double, kHumComponents> phase, step;
        for (int c = 0; c < kHumComponents; ++c) {
            const double hz = mel_to_hz(mel_hi * (c + 1) / (kHumComponents + 1.0));
            phase[c] = phase_dist(rng);
            step[c] = 2.0 * kPi * hz / kSampleRate;
        }
        for (long long i = 0; i < n_samples; ++i) {
            double v = 0.0;
            for (int c = 0; c < kHumComponents; ++c) {
                v += std::sin(phase[c]);
                phase[c] += step[c];
            }
            clip.audio.samples[i] = comp_amp * v * (1.0 - kDuck * voicing[i]);
        }
    }

    clip.rude.assign(total_frames, kClassNone);
    clip.segment.assign(total_frames, kSegSilence);
    clip.speaker.assign(total_frames, kSegSilence);  // -1: nobody is speaking

    auto frame_samples = [](int f0, int f1) {  // sample span covering frames [f0, f1)
        return std::pair<long long, long long>(static_cast<long long>(f0) * kHopLen,
                                               static_cast<long long>(f1 - 1) * kHopLen + kFrameLen);
    };

    for (std::size_t i = 0; i < live.size(); ++i) {
        Slot& s = *live[i];
        // The voiced span extends through any chain of glued interruptions.
        int voice_end = s.start + s.len;
        for (std::size_t j = i + 1; j < live.size() && live[j]->cls == kClassInterruption &&
                                    live[j]->start == voice_end;
             ++j)
            voice_end = live[j]->start + live[j]->len;
        const bool interrupted = voice_end != s.start + s.len;

        if (s.cls == kClassInterruption && i > 0)
            if (live[i - 1]->speaker == s.speaker) s.speaker = 1 - s.speaker;

        PhraseParams params = draw_phrase_params(rng, s.speaker);
        PhraseParams raised = params;
        apply_raised_tone(raised, spec.raised_tone_gain_db, spec.raised_tone_pitch_factor);
        const PhraseParams& use = s.cls == kClassRaisedTone ? raised : params;

        const auto [s0, s1] = frame_samples(s.start, voice_end);
        render_voice(clip.audio.samples, use, s0, std::min<long long>(s1, n_samples));

        for (int f = s.start; f < s.start + s.len; ++f) clip.rude[f] = s.cls;

        if (s.cls == kClassInterruption) {
            for (int f = s.start; f < s.start + s.len; ++f) clip.segment[f] = kSegMiddle;
        } else {
            const int head = std::max(1, static_cast<int>(std::lround(0.2 * s.len)));
            const int tail = interrupted ? 0 : std::max(1, static_cast<int>(std::lround(0.2 * s.len)));
            for (int f = s.start; f < s.start + s.len; ++f) {
                if (f < s.start + head)
                    clip.segment[f] = kSegBeginning;
                else if (f >= s.start + s.len - tail)
                    clip.segment[f] = kSegEnd;
                else
                    clip.segment[f] = kSegMiddle;
            }
        }

        for (int f = s.start; f < s.start + s.len; ++f) clip.speaker[f] = s.speaker;
    }

    for (const Slot* s : live) {
        TranscriptPhrase ph;
        ph.rude = s->cls == kClassVerbalInsult;
        ph.text = make_sentence(rng, ph.rude);
        clip.transcript.push_back(std::move(ph));
    }
    return clip;
}

}  // namespace synth_detail

inline void validate_spec(const SynthesisSpec& spec) {
    if (spec.sample_rate != kSampleRate)
        throw DataError("synthesis sample_rate is fixed at 16000");
    if (spec.n_clips <= 0) throw DataError("n_clips must be positive");
    if (spec.clip_seconds <= 0.0) throw DataError("clip_seconds must be positive");
    double sum = 0.0;
    for (double p : spec.class_mix) {
        if (p < 0.0) throw DataError("class_mix entries must be nonnegative");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw DataError("class_mix must sum to 1");
    if (spec.raised_tone_pitch_factor <= 0.0) throw DataError("pitch factor must be positive");
}

inline CorpusManifest generate_synthetic_corpus(const SynthesisSpec& spec,
                                                const std::string& out_dir) {
    validate_spec(spec);
    const long long n_samples = std::llround(spec.clip_seconds * kSampleRate);
    const int frames = frame_count(n_samples);
    if (frames < synth_detail::kMinPhraseFrames)
        throw DataError("clip_seconds too short to hold a phrase");

    using synth_detail::Slot;
    std::seed_seq plan_seq{spec.seed};
    std::mt19937 plan(plan_seq);

    // Pass 1: layout — phrase slots with silence gaps, speakers with sticky turns.
    std::vector<std::vector<Slot>> clips(spec.n_clips);
    std::uniform_int_distribution<int> gap_dist(12, 28), len_dist(50, 100);
    std::bernoulli_distribution coin(0.5), turn(0.35);
    for (auto& slots : clips) {
        int cursor = 0, speaker = coin(plan) ? 1 : 0;
        bool first = true;
        while (true) {
            Slot s;
            s.gap_before = gap_dist(plan);
            s.len = len_dist(plan);
            if (cursor + s.gap_before + s.len + 5 > frames) break;
            if (!first && turn(plan)) speaker = 1 - speaker;
            s.speaker = speaker;
            cursor += s.gap_before + s.len;
            slots.push_back(s);
            first = false;
        }
    }

    // Pass 2: greedy quota-driven class assignment, per clip so every clip
    // approximates the requested mix. Silence contributes to the None quota;
    // shrinking the final phrase of a class keeps the per-class frame error
    // small (bounded by the minimum phrase length).
    for (auto& slots : clips) {
        long long phrase_total = 0;
        for (const auto& s : slots) phrase_total += s.len;
        std::array<double, 4> want{};
        for (int k = 0; k < 4; ++k) want[k] = spec.class_mix[k] * static_cast<double>(frames);
        want[kClassNone] -= static_cast<double>(frames - phrase_total);  // silence is None
        for (std::size_t i = 0; i < slots.size(); ++i) {
            Slot& s = slots[i];
            const bool interruption_ok =
                i > 0 && slots[i - 1].len > 0 && slots[i - 1].cls != kClassInterruption;
            int best = -1;
            for (int k = 0; k < 4; ++k) {
                if (k == kClassInterruption && !interruption_ok) continue;
                if (best < 0 || want[k] > want[best]) best = k;
            }
            // Slots are the scarce resource: each pending rude class will need
            // about ceil(want / typical_len) of them. If handing this slot to
            // None would leave too few, promote the hungriest rude class now.
            if (best == kClassNone) {
                double rude_slots = 0.0;
                int hungriest = -1;
                for (int k = 1; k < 4; ++k) {
                    if (want[k] < synth_detail::kMinPhraseFrames) continue;
                    rude_slots += std::ceil(want[k] / 75.0);
                    if (k != kClassInterruption || interruption_ok)
                        if (hungriest < 0 || want[k] > want[hungriest]) hungriest = k;
                }
                if (hungriest >= 0 &&
                    rude_slots >= static_cast<double>(slots.size() - i))
                    best = hungriest;
            }
            if (want[best] < synth_detail::kMinPhraseFrames) {
                want[kClassNone] -= s.len;  // drop the slot; frames become silence
                s.len = 0;
                continue;
            }
            const int shrunk = std::min<long long>(
                s.len, std::max<long long>(synth_detail::kMinPhraseFrames,
                                           std::llround(want[best])));
            want[kClassNone] -= s.len - shrunk;  // freed frames become silence
            s.len = shrunk;
            s.cls = best;
            want[best] -= s.len;
        }
    }

    // Pass 3: render and write.
    CorpusManifest rel;
    for (int i = 0; i < spec.n_clips; ++i) {
        const auto clip = synth_detail::render_clip(spec, i, clips[i], frames, n_samples);
        char stem[32];
        std::snprintf(stem, sizeof stem, "clip_%03d", i);
        ManifestEntry e;
        e.audio_path = std::string(stem) + ".wav";
        e.rude_labels_path = std::string(stem) + "_rude.csv";
        e.segment_labels_path = std::string(stem) + "_seg.csv";
        e.speaker_labels_path = std::string(stem) + "_spk.csv";
        e.transcript_path = std::string(stem) + "_transcript.tsv";
        e.split = i % 3 == 2 ? "test" : "train";
        save_wav(join_path(out_dir, e.audio_path), clip.audio);
        write_label_csv(join_path(out_dir, e.rude_labels_path), clip.rude);
        write_label_csv(join_path(out_dir, e.segment_labels_path), clip.segment);
        write_label_csv(join_path(out_dir, e.speaker_labels_path), clip.speaker);
        write_transcript(join_path(out_dir, e.transcript_path), clip.transcript);
        rel.entries.push_back(std::move(e));
    }
    const std::string manifest_path = join_path(out_dir, "manifest.tsv");
    write_manifest(manifest_path, rel);
    return load_manifest(manifest_path);
}

// A two-speaker clip with exactly one turn change, used by the diarization
// tests: speaker 0 talks from the first frame, pauses briefly, then speaker 1
// talks to the end. The default pause (frames 455..464) sits between the
// windows of the default M=10/gap=100 pairing grid, so every scored window is
// fully voiced. Returns the rendered clip plus the true change time (the
// start of speaker 1's phrase).
struct ProbeClip {
    RenderedClip clip;
    int true_change_ms = 0;
};

// The clip holds ordinary-length phrases throughout — speaker 0's up to
// first_len_frames, speaker 1's after a short pause — so its windows look
// exactly like the windows a model was trained on; only the speaker switch in
// the middle is special. Phrases repeat every 100 frames, matching the
// analysis stride used over the clip, and the clip opens mid-phrase — as a
// cut from a longer recording would — via a trimmed-away pre-roll, so every
// analysis window sits comfortably inside a phrase rather than on an onset
// or a pause.
inline ProbeClip render_two_speaker_probe(long long seed, int first_len_frames = 455,
                                          int gap_frames = 10, double total_s = 10.0) {
    SynthesisSpec spec;
    spec.seed = seed;
    const long long n_samples = std::llround(total_s * kSampleRate);
    const int frames = frame_count(n_samples);
    const int second_start = first_len_frames + gap_frames;
    if (second_start + synth_detail::kMinPhraseFrames > frames ||
        first_len_frames < synth_detail::kMinPhraseFrames + 5)
        throw DataError("render_two_speaker_probe: clip too short for the requested layout");

    static constexpr int kPreRoll = 35;
    static constexpr int kPhraseLen = 90;
    static constexpr int kInnerGap = 10;
    const int ext_frames = frames + kPreRoll;
    const long long ext_samples = n_samples + static_cast<long long>(kPreRoll) * kHopLen;
    std::vector<synth_detail::Slot> slots;
    auto fill_region = [&slots](int begin, int end, int speaker, int lead_gap) {
        int cursor = begin;
        int gap = lead_gap;
        while (cursor + gap + synth_detail::kMinPhraseFrames <= end) {
            synth_detail::Slot s;
            s.gap_before = gap;
            s.len = std::min(kPhraseLen, end - cursor - gap);
            s.cls = kClassNone;
            s.speaker = speaker;
            slots.push_back(s);
            cursor += gap + s.len;
            gap = kInnerGap;
        }
        return cursor;
    };
    fill_region(0, first_len_frames + kPreRoll, 0, 0);
    fill_region(first_len_frames + kPreRoll, ext_frames, 1, gap_frames);

    ProbeClip probe;
    probe.clip = synth_detail::render_clip(spec, 0, slots, ext_frames, ext_samples);
    auto& samples = probe.clip.audio.samples;
    samples.erase(samples.begin(), samples.begin() + kPreRoll * kHopLen);
    auto trim = [](LabelTrack& t) { t.erase(t.begin(), t.begin() + kPreRoll); };
    trim(probe.clip.rude);
    trim(probe.clip.segment);
    trim(probe.clip.speaker);
    probe.true_change_ms = second_start * kHopMs;
    return probe;
}

}  // namespace rudetect
