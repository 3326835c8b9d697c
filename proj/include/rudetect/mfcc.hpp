// mfcc.hpp — MFCC extraction at 10 ms hop and the acceleration (delta-delta)
// features every classifier in this toolkit consumes.
//
// Pipeline constants below are the configuration of record: 25 ms Hamming
// window, 10 ms hop, pre-emphasis 0.97, 512-point magnitude FFT, 26 triangular
// mel filters over 0-8000 Hz, natural-log energies floored at 1e-10, and an
// orthonormal DCT-II keeping coefficients 0..12.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>

#include "rudetect/audio.hpp"
#include "rudetect/common.hpp"

namespace rudetect {

inline constexpr int kFrameLen = 400;  // 25 ms at 16 kHz
inline constexpr int kHopLen = 160;    // 10 ms
inline constexpr int kHopMs = 10;
inline constexpr int kNfft = 512;
inline constexpr double kPreEmphasis = 0.97;
inline constexpr int kNumFilters = 26;
inline constexpr int kNumCoeffs = 13;
inline constexpr double kMelHighHz = 8000.0;
inline constexpr double kLogFloor = 1e-10;
inline constexpr int kFeatureDim = 12;   // acceleration coefficients 2..13
inline constexpr int kDeltaWindow = 2;   // regression half-width for deltas

struct MfccFrame {
    std::array<double, kNumCoeffs> c;  // F_1..F_13, F_1 = 0th cepstral coefficient
    int t_ms = 0;
};

// Per-frame 12-dim acceleration vectors; row i is z_i.
struct FrameFeatureTrack {
    Mat frames;
    int hop_ms = kHopMs;
    std::size_t size() const { return frames.size(); }
};

inline double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

namespace dsp_detail {

// Iterative radix-2 FFT; size must be a power of two.
inline void fft_inplace(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * kPi / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const auto u = a[i + k];
                const auto v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

inline const Vec& hamming_window() {
    static const Vec w = [] {
        Vec v(kFrameLen);
        for (int n = 0; n < kFrameLen; ++n)
            v[n] = 0.54 - 0.46 * std::cos(2.0 * kPi * n / (kFrameLen - 1));
        return v;
    }();
    return w;
}

// 26 triangles on a uniform mel grid over [0, 8000] Hz, evaluated at the
// continuous bin positions of the 512-point spectrum (no integer snapping).
inline const Mat& mel_filterbank() {
    static const Mat fb = [] {
        const int nbins = kNfft / 2 + 1;
        std::array<double, kNumFilters + 2> bin_pos{};
        const double mel_lo = hz_to_mel(0.0);
        const double mel_hi = hz_to_mel(kMelHighHz);
        for (int j = 0; j < kNumFilters + 2; ++j) {
            const double mel = mel_lo + (mel_hi - mel_lo) * j / (kNumFilters + 1);
            bin_pos[j] = mel_to_hz(mel) * kNfft / kSampleRate;
        }
        Mat filters(kNumFilters, Vec(nbins, 0.0));
        for (int k = 0; k < kNumFilters; ++k) {
            const double lo = bin_pos[k], mid = bin_pos[k + 1], hi = bin_pos[k + 2];
            for (int b = 0; b < nbins; ++b) {
                const double x = static_cast<double>(b);
                if (x > lo && x < mid)
                    filters[k][b] = (x - lo) / (mid - lo);
                else if (x >= mid && x < hi)
                    filters[k][b] = (hi - x) / (hi - mid);
            }
        }
        return filters;
    }();
    return fb;
}

// Orthonormal DCT-II rows: 13 x 26.
inline const Mat& dct_rows() {
    static const Mat rows = [] {
        Mat r(kNumCoeffs, Vec(kNumFilters));
        for (int n = 0; n < kNumCoeffs; ++n) {
            const double scale = std::sqrt((n == 0 ? 1.0 : 2.0) / kNumFilters);
            for (int k = 0; k < kNumFilters; ++k)
                r[n][k] = scale * std::cos(kPi * n * (2 * k + 1) / (2.0 * kNumFilters));
        }
        return r;
    }();
    return rows;
}

}  // namespace dsp_detail

// Frame count for a signal of n samples: floor((n - 400) / 160) + 1.
inline int frame_count(std::size_t n_samples) {
    if (n_samples < static_cast<std::size_t>(kFrameLen)) return 0;
    return static_cast<int>((n_samples - kFrameLen) / kHopLen) + 1;
}

inline std::vector<MfccFrame> extract_mfcc(const AudioBuffer& audio) {
    if (audio.sample_rate != kSampleRate)
        throw DataError("extract_mfcc: audio must be 16 kHz after ingestion");
    const std::size_t n = audio.samples.size();
    if (n < static_cast<std::size_t>(kFrameLen))
        throw DataError("extract_mfcc: audio shorter than one 25 ms window");

    // Pre-emphasis over the whole signal; the first sample is kept as-is.
    Vec emph(n);
    emph[0] = audio.samples[0];
    for (std::size_t i = 1; i < n; ++i)
        emph[i] = audio.samples[i] - kPreEmphasis * audio.samples[i - 1];

    const Vec& win = dsp_detail::hamming_window();
    const Mat& fb = dsp_detail::mel_filterbank();
    const Mat& dct = dsp_detail::dct_rows();
    const int nframes = frame_count(n);
    const int nbins = kNfft / 2 + 1;

    std::vector<MfccFrame> out(nframes);
    std::vector<std::complex<double>> buf(kNfft);
    Vec mag(nbins), loge(kNumFilters);
    for (int f = 0; f < nframes; ++f) {
        const std::size_t start = static_cast<std::size_t>(f) * kHopLen;
        for (int i = 0; i < kFrameLen; ++i)
            buf[i] = emph[start + i] * win[i];
        for (int i = kFrameLen; i < kNfft; ++i) buf[i] = 0.0;
        dsp_detail::fft_inplace(buf);
        for (int b = 0; b < nbins; ++b) mag[b] = std::abs(buf[b]);
        for (int k = 0; k < kNumFilters; ++k) {
            double e = 0.0;
            for (int b = 0; b < nbins; ++b) e += fb[k][b] * mag[b];
            loge[k] = std::log(e < kLogFloor ? kLogFloor : e);
        }
        for (int c = 0; c < kNumCoeffs; ++c) {
            double acc = 0.0;
            for (int k = 0; k < kNumFilters; ++k) acc += dct[c][k] * loge[k];
            out[f].c[c] = acc;
        }
        out[f].t_ms = f * kHopMs;
    }
    return out;
}

namespace dsp_detail {

// Regression delta with half-width 2 and replicated edges:
// d_t = (1*(c[t+1]-c[t-1]) + 2*(c[t+2]-c[t-2])) / 10.
inline Mat delta(const Mat& c) {
    const int n = static_cast<int>(c.size());
    const int dim = static_cast<int>(c[0].size());
    double denom = 0.0;
    for (int k = 1; k <= kDeltaWindow; ++k) denom += 2.0 * k * k;
    Mat d(n, Vec(dim));
    auto clampi = [n](int i) { return i < 0 ? 0 : (i >= n ? n - 1 : i); };
    for (int t = 0; t < n; ++t)
        for (int j = 0; j < dim; ++j) {
            double acc = 0.0;
            for (int k = 1; k <= kDeltaWindow; ++k)
                acc += k * (c[clampi(t + k)][j] - c[clampi(t - k)][j]);
            d[t][j] = acc / denom;
        }
    return d;
}

}  // namespace dsp_detail

// Second temporal derivative of the MFCC trajectories; the acceleration of the
// first coefficient is dropped, leaving 12-dim z_i. Output length equals input.
inline FrameFeatureTrack acceleration_features(const std::vector<MfccFrame>& mfcc) {
    if (mfcc.size() < 5)
        throw DataError("acceleration_features: need at least 5 frames");
    Mat c(mfcc.size(), Vec(kNumCoeffs));
    for (std::size_t i = 0; i < mfcc.size(); ++i)
        for (int j = 0; j < kNumCoeffs; ++j) c[i][j] = mfcc[i].c[j];
    const Mat accel = dsp_detail::delta(dsp_detail::delta(c));
    FrameFeatureTrack track;
    track.frames.assign(accel.size(), Vec(kFeatureDim));
    for (std::size_t i = 0; i < accel.size(); ++i)
        for (int j = 0; j < kFeatureDim; ++j) track.frames[i][j] = accel[i][j + 1];
    return track;
}

// Per-dimension [min, max] over training frames, used for the [0, 1] scaling.
struct ScalingBounds {
    Vec lo, hi;  // size 12 each
};

inline ScalingBounds fit_scaling(const std::vector<FrameFeatureTrack>& train) {
    std::size_t total = 0;
    for (const auto& t : train) total += t.frames.size();
    if (total == 0) throw DataError("fit_scaling: no training frames");
    ScalingBounds b;
    b.lo.assign(kFeatureDim, std::numeric_limits<double>::infinity());
    b.hi.assign(kFeatureDim, -std::numeric_limits<double>::infinity());
    for (const auto& t : train)
        for (const auto& row : t.frames) {
            if (row.size() != kFeatureDim) throw DataError("fit_scaling: bad frame dimension");
            for (int j = 0; j < kFeatureDim; ++j) {
                b.lo[j] = std::min(b.lo[j], row[j]);
                b.hi[j] = std::max(b.hi[j], row[j]);
            }
        }
    return b;
}

// (x - min) / (max - min), clamped to [0, 1]; a flat dimension maps to 0.
inline FrameFeatureTrack apply_scaling(const FrameFeatureTrack& track, const ScalingBounds& bounds) {
    if (bounds.lo.size() != kFeatureDim || bounds.hi.size() != kFeatureDim)
        throw DataError("apply_scaling: bad bounds dimension");
    FrameFeatureTrack out;
    out.hop_ms = track.hop_ms;
    out.frames.assign(track.frames.size(), Vec(kFeatureDim));
    for (std::size_t i = 0; i < track.frames.size(); ++i) {
        if (track.frames[i].size() != kFeatureDim)
            throw DataError("apply_scaling: bad frame dimension");
        for (int j = 0; j < kFeatureDim; ++j) {
            const double span = bounds.hi[j] - bounds.lo[j];
            double v = span <= 0.0 ? 0.0 : (track.frames[i][j] - bounds.lo[j]) / span;
            out.frames[i][j] = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
        }
    }
    return out;
}

inline std::string feature_csv(const FrameFeatureTrack& track) {
    std::string s = "frame_index,t_ms";
    for (int j = 1; j <= kFeatureDim; ++j) s += ",z" + std::to_string(j);
    s += "\n";
    for (std::size_t i = 0; i < track.frames.size(); ++i) {
        s += std::to_string(i) + "," + std::to_string(i * track.hop_ms);
        for (int j = 0; j < kFeatureDim; ++j) s += "," + fmt9(track.frames[i][j]);
        s += "\n";
    }
    return s;
}

inline void write_feature_csv(const std::string& path, const FrameFeatureTrack& track) {
    write_text(path, feature_csv(track));
}

inline FrameFeatureTrack read_feature_csv(const std::string& path) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw DataError("empty feature file " + path);
    std::string header = "frame_index,t_ms";
    for (int j = 1; j <= kFeatureDim; ++j) header += ",z" + std::to_string(j);
    if (lines[0] != header) throw DataError("bad feature header in " + path);
    FrameFeatureTrack track;
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        if (trim(lines[ln]).empty()) continue;
        const auto f = split(lines[ln], ',');
        const std::string where = path + ":" + std::to_string(ln + 1);
        if (f.size() != 2 + kFeatureDim) throw DataError("bad feature row (" + where + ")");
        if (parse_int(f[0], where) != static_cast<long long>(track.frames.size()))
            throw DataError("frame_index not contiguous (" + where + ")");
        Vec row(kFeatureDim);
        for (int j = 0; j < kFeatureDim; ++j) row[j] = parse_real(f[2 + j], where);
        track.frames.push_back(std::move(row));
    }
    return track;
}

inline void write_bounds_csv(const std::string& path, const ScalingBounds& b) {
    std::string s = "dim,min,max\n";
    for (int j = 0; j < kFeatureDim; ++j)
        s += std::to_string(j + 1) + "," + fmt9(b.lo[j]) + "," + fmt9(b.hi[j]) + "\n";
    write_text(path, s);
}

inline ScalingBounds read_bounds_csv(const std::string& path) {
    const auto lines = read_lines(path);
    if (lines.empty() || lines[0] != "dim,min,max")
        throw DataError("bad scaling bounds file " + path);
    ScalingBounds b;
    b.lo.assign(kFeatureDim, 0.0);
    b.hi.assign(kFeatureDim, 0.0);
    int seen = 0;
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        if (trim(lines[ln]).empty()) continue;
        const auto f = split(lines[ln], ',');
        const std::string where = path + ":" + std::to_string(ln + 1);
        if (f.size() != 3) throw DataError("bad bounds row (" + where + ")");
        const long long d = parse_int(f[0], where);
        if (d < 1 || d > kFeatureDim) throw DataError("bounds dim out of range (" + where + ")");
        b.lo[d - 1] = parse_real(f[1], where);
        b.hi[d - 1] = parse_real(f[2], where);
        ++seen;
    }
    if (seen != kFeatureDim) throw DataError("bounds file must list all 12 dims: " + path);
    return b;
}

}  // namespace rudetect
