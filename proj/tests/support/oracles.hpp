// Independent reference implementations used only by tests. Everything here is
// written from the definitions (naive O(N^2) DFT, direct dual ascent, direct
// probability products) rather than sharing code with the library, so that a
// bug in the library cannot cancel out in the comparison.
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// MFCC reference: pre-emphasis, Hamming, naive DFT magnitude, 26 mel filters
// between 0 and 8000 Hz, ln with a 1e-10 floor, orthonormal DCT-II, 13 coeffs.
// ---------------------------------------------------------------------------

inline std::vector<double> naive_dft_magnitude(const std::vector<double>& frame, int nfft) {
    std::vector<double> mag(static_cast<std::size_t>(nfft / 2 + 1));
    for (int k = 0; k <= nfft / 2; ++k) {
        std::complex<double> acc(0.0, 0.0);
        for (std::size_t n = 0; n < frame.size(); ++n) {
            const double ang = -2.0 * kPi * k * static_cast<double>(n) / nfft;
            acc += frame[n] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        mag[static_cast<std::size_t>(k)] = std::abs(acc);
    }
    return mag;
}

inline double mel_of_hz(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double hz_of_mel(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

// Filter weights evaluated at the integer DFT bins, with the filter corners at
// fractional bin positions (no snapping to integers).
inline std::vector<std::vector<double>> mel_filters(int n_filters, int nfft, int sample_rate,
                                                    double high_hz) {
    const double mel_high = mel_of_hz(high_hz);
    std::vector<double> corner_bin(static_cast<std::size_t>(n_filters) + 2);
    for (int j = 0; j < n_filters + 2; ++j) {
        const double hz = hz_of_mel(mel_high * j / (n_filters + 1));
        corner_bin[static_cast<std::size_t>(j)] = hz * nfft / sample_rate;
    }
    std::vector<std::vector<double>> filters(static_cast<std::size_t>(n_filters));
    for (int f = 0; f < n_filters; ++f) {
        const double lo = corner_bin[static_cast<std::size_t>(f)];
        const double mid = corner_bin[static_cast<std::size_t>(f) + 1];
        const double hi = corner_bin[static_cast<std::size_t>(f) + 2];
        auto& w = filters[static_cast<std::size_t>(f)];
        w.assign(static_cast<std::size_t>(nfft / 2 + 1), 0.0);
        for (int b = 0; b <= nfft / 2; ++b) {
            const double x = b;
            double v = 0.0;
            if (x >= lo && x <= mid)
                v = (x - lo) / (mid - lo);
            else if (x > mid && x <= hi)
                v = (hi - x) / (hi - mid);
            w[static_cast<std::size_t>(b)] = v;
        }
    }
    return filters;
}

inline std::vector<std::vector<double>> mfcc_reference(const std::vector<double>& samples) {
    const int frame_len = 400, hop = 160, nfft = 512, n_filters = 26, n_coeffs = 13;
    const int sample_rate = 16000;
    if (static_cast<int>(samples.size()) < frame_len) return {};

    std::vector<double> emphasized(samples.size());
    emphasized[0] = samples[0];
    for (std::size_t n = 1; n < samples.size(); ++n)
        emphasized[n] = samples[n] - 0.97 * samples[n - 1];

    std::vector<double> window(frame_len);
    for (int n = 0; n < frame_len; ++n)
        window[static_cast<std::size_t>(n)] =
            0.54 - 0.46 * std::cos(2.0 * kPi * n / (frame_len - 1));

    const auto filters = mel_filters(n_filters, nfft, sample_rate, 8000.0);
    const int n_frames = (static_cast<int>(samples.size()) - frame_len) / hop + 1;

    std::vector<std::vector<double>> out;
    for (int t = 0; t < n_frames; ++t) {
        std::vector<double> frame(static_cast<std::size_t>(nfft), 0.0);
        for (int n = 0; n < frame_len; ++n)
            frame[static_cast<std::size_t>(n)] =
                emphasized[static_cast<std::size_t>(t * hop + n)] *
                window[static_cast<std::size_t>(n)];
        const auto mag = naive_dft_magnitude(frame, nfft);

        std::vector<double> log_energy(n_filters);
        for (int f = 0; f < n_filters; ++f) {
            double e = 0.0;
            for (std::size_t b = 0; b < mag.size(); ++b)
                e += filters[static_cast<std::size_t>(f)][b] * mag[b];
            if (e < 1e-10) e = 1e-10;
            log_energy[static_cast<std::size_t>(f)] = std::log(e);
        }

        std::vector<double> coeffs(n_coeffs);
        for (int k = 0; k < n_coeffs; ++k) {
            double acc = 0.0;
            for (int n = 0; n < n_filters; ++n)
                acc += log_energy[static_cast<std::size_t>(n)] *
                       std::cos(kPi * k * (2.0 * n + 1.0) / (2.0 * n_filters));
            const double scale =
                (k == 0) ? std::sqrt(1.0 / n_filters) : std::sqrt(2.0 / n_filters);
            coeffs[static_cast<std::size_t>(k)] = scale * acc;
        }
        out.push_back(coeffs);
    }
    return out;
}

// Regression delta over a +/-2 neighbourhood with clamped indices, applied to
// each coefficient column independently.
inline std::vector<std::vector<double>> delta_reference(
    const std::vector<std::vector<double>>& rows) {
    const int n = static_cast<int>(rows.size());
    std::vector<std::vector<double>> out(rows.size(),
                                         std::vector<double>(rows.empty() ? 0 : rows[0].size()));
    for (int t = 0; t < n; ++t) {
        for (std::size_t d = 0; d < rows[0].size(); ++d) {
            double num = 0.0;
            for (int k = 1; k <= 2; ++k) {
                const int fwd = std::min(t + k, n - 1);
                const int back = std::max(t - k, 0);
                num += k * (rows[static_cast<std::size_t>(fwd)][d] -
                            rows[static_cast<std::size_t>(back)][d]);
            }
            out[static_cast<std::size_t>(t)][d] = num / 10.0;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// SVM dual reference: projected gradient ascent on the dual objective
//   W(a) = sum a_i - 1/2 sum_ij a_i a_j y_i y_j K_ij
// subject to 0 <= a_i <= C and sum a_i y_i = 0. Slow but independent of SMO.
// ---------------------------------------------------------------------------

struct DualSolution {
    std::vector<double> alphas;
    double objective = 0.0;
};

inline double dual_objective(const std::vector<double>& a, const std::vector<int>& y,
                             const std::vector<std::vector<double>>& K) {
    const std::size_t n = a.size();
    double obj = 0.0;
    for (std::size_t i = 0; i < n; ++i) obj += a[i];
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            obj -= 0.5 * a[i] * a[j] * y[i] * y[j] * K[i][j];
    return obj;
}

inline DualSolution dual_ascent(const std::vector<std::vector<double>>& K,
                                const std::vector<int>& y, double C, int iters, double step) {
    const std::size_t n = y.size();
    std::vector<double> a(n, 0.0);
    for (int it = 0; it < iters; ++it) {
        std::vector<double> grad(n);
        for (std::size_t i = 0; i < n; ++i) {
            double g = 1.0;
            for (std::size_t j = 0; j < n; ++j) g -= a[j] * y[i] * y[j] * K[i][j];
            grad[i] = g;
        }
        // Project the gradient onto the hyperplane sum a_i y_i = 0 so the
        // equality constraint is preserved, then step and clip to the box.
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += grad[i] * y[i];
        for (std::size_t i = 0; i < n; ++i) grad[i] -= dot * y[i] / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] += step * grad[i];
            if (a[i] < 0.0) a[i] = 0.0;
            if (a[i] > C) a[i] = C;
        }
        // Box clipping can break the equality constraint; repair it by
        // shifting mass between the two classes' interior points.
        double violation = 0.0;
        for (std::size_t i = 0; i < n; ++i) violation += a[i] * y[i];
        for (int repair = 0; repair < 50 && std::fabs(violation) > 1e-12; ++repair) {
            std::vector<std::size_t> movable;
            for (std::size_t i = 0; i < n; ++i) {
                const double delta = -violation * y[i];
                if ((delta > 0.0 && a[i] < C) || (delta < 0.0 && a[i] > 0.0))
                    movable.push_back(i);
            }
            if (movable.empty()) break;
            const double share = violation / static_cast<double>(movable.size());
            for (std::size_t i : movable) {
                a[i] -= share * y[i];
                if (a[i] < 0.0) a[i] = 0.0;
                if (a[i] > C) a[i] = C;
            }
            violation = 0.0;
            for (std::size_t i = 0; i < n; ++i) violation += a[i] * y[i];
        }
    }
    return {a, dual_objective(a, y, K)};
}

// ---------------------------------------------------------------------------
// Bernoulli naive Bayes reference: raw probability products, no logarithms.
// presence[w] is 1 when vocabulary word w occurs in the phrase.
// ---------------------------------------------------------------------------

struct NbReference {
    double p_rude = 0.0;
    double p_not_rude = 0.0;
};

inline NbReference nb_posterior_reference(const std::vector<int>& presence,
                                          const std::vector<double>& p_word_rude,
                                          const std::vector<double>& p_word_not_rude,
                                          double prior_rude) {
    double joint_rude = prior_rude;
    double joint_not = 1.0 - prior_rude;
    for (std::size_t w = 0; w < presence.size(); ++w) {
        joint_rude *= presence[w] ? p_word_rude[w] : 1.0 - p_word_rude[w];
        joint_not *= presence[w] ? p_word_not_rude[w] : 1.0 - p_word_not_rude[w];
    }
    const double total = joint_rude + joint_not;
    if (total == 0.0) return {0.0, 0.0};
    return {joint_rude / total, joint_not / total};
}

}  // namespace oracle
