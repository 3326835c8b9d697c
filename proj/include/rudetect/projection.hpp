// projection.hpp — 2-D views of the 12-dim feature space: PCA via iterated
// power method with deflation, and exact (non-approximate) t-SNE.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "rudetect/common.hpp"

namespace rudetect {

struct Projection {
    Mat coords;      // N x out_dim
    Mat components;  // PCA only: out_dim orthonormal direction vectors
    Vec explained;   // PCA only: explained-variance ratio per component
    double kl_initial = std::numeric_limits<double>::quiet_NaN();  // t-SNE only
    double kl_final = std::numeric_limits<double>::quiet_NaN();    // t-SNE only
    bool jitter_applied = false;  // t-SNE: duplicate inputs were perturbed
};

// ---------------------------------------------------------------------------
// PCA

inline Projection pca_project(const Mat& points, int out_dim = 2) {
    const std::size_t n = points.size();
    if (n < 2) throw DataError("pca_project: need at least 2 points");
    const std::size_t dim = points[0].size();
    if (out_dim < 1 || static_cast<std::size_t>(out_dim) > dim)
        throw DataError("pca_project: out_dim out of range");

    Vec mean(dim, 0.0);
    for (const auto& p : points)
        for (std::size_t d = 0; d < dim; ++d) mean[d] += p[d];
    for (auto& v : mean) v /= static_cast<double>(n);
    Mat X(n, Vec(dim));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t d = 0; d < dim; ++d) X[i][d] = points[i][d] - mean[d];

    Mat C(dim, Vec(dim, 0.0));  // sample covariance
    for (const auto& row : X)
        for (std::size_t a = 0; a < dim; ++a)
            for (std::size_t b = 0; b < dim; ++b) C[a][b] += row[a] * row[b];
    double trace = 0.0;
    for (std::size_t a = 0; a < dim; ++a) {
        for (std::size_t b = 0; b < dim; ++b) C[a][b] /= static_cast<double>(n - 1);
        trace += C[a][a];
    }
    if (trace <= 0.0) throw DataError("pca_project: degenerate input (all points identical)");

    auto matvec = [&C, dim](const Vec& v) {
        Vec out(dim, 0.0);
        for (std::size_t a = 0; a < dim; ++a)
            for (std::size_t b = 0; b < dim; ++b) out[a] += C[a][b] * v[b];
        return out;
    };
    auto norm = [](const Vec& v) {
        double s = 0.0;
        for (double x : v) s += x * x;
        return std::sqrt(s);
    };

    Mat components;
    Vec eigenvalues;
    for (int comp = 0; comp < out_dim; ++comp) {
        // Start from the axis with the most remaining variance.
        std::size_t axis = 0;
        for (std::size_t a = 1; a < dim; ++a)
            if (C[a][a] > C[axis][axis]) axis = a;
        Vec v(dim, 0.0);
        v[axis] = 1.0;
        for (int iter = 0; iter < 10000; ++iter) {
            Vec next = matvec(v);
            // Re-orthogonalize against the components already found.
            for (const auto& u : components) {
                double dot = 0.0;
                for (std::size_t d = 0; d < dim; ++d) dot += next[d] * u[d];
                for (std::size_t d = 0; d < dim; ++d) next[d] -= dot * u[d];
            }
            const double len = norm(next);
            if (len == 0.0) break;  // no variance left in this subspace
            for (auto& x : next) x /= len;
            double delta = 0.0, dot = 0.0;
            for (std::size_t d = 0; d < dim; ++d) dot += next[d] * v[d];
            const double sign = dot < 0.0 ? -1.0 : 1.0;
            for (std::size_t d = 0; d < dim; ++d)
                delta = std::max(delta, std::abs(next[d] - sign * v[d]));
            v = std::move(next);
            if (delta < 1e-9) break;
        }
        const Vec Cv = matvec(v);
        double lambda = 0.0;
        for (std::size_t d = 0; d < dim; ++d) lambda += v[d] * Cv[d];
        // Fix the sign: largest-magnitude entry positive.
        std::size_t big = 0;
        for (std::size_t d = 1; d < dim; ++d)
            if (std::abs(v[d]) > std::abs(v[big])) big = d;
        if (v[big] < 0.0)
            for (auto& x : v) x = -x;
        for (std::size_t a = 0; a < dim; ++a)
            for (std::size_t b = 0; b < dim; ++b) C[a][b] -= lambda * v[a] * v[b];
        components.push_back(std::move(v));
        eigenvalues.push_back(std::max(0.0, lambda));
    }

    Projection proj;
    proj.coords.assign(n, Vec(out_dim, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (int c = 0; c < out_dim; ++c)
            for (std::size_t d = 0; d < dim; ++d)
                proj.coords[i][c] += X[i][d] * components[c][d];
    for (double ev : eigenvalues) proj.explained.push_back(ev / trace);
    proj.components = std::move(components);
    return proj;
}

// ---------------------------------------------------------------------------
// t-SNE (exact)

namespace tsne_detail {

inline Mat squared_distances(const Mat& X) {
    const std::size_t n = X.size();
    Mat D(n, Vec(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double d = 0.0;
            for (std::size_t k = 0; k < X[i].size(); ++k)
                d += (X[i][k] - X[j][k]) * (X[i][k] - X[j][k]);
            D[i][j] = D[j][i] = d;
        }
    return D;
}

// Conditional distribution row with the bandwidth beta found by binary search
// so the row entropy matches log(perplexity) within 1e-5.
inline void perplexity_row(const Vec& d_row, std::size_t self, double target_entropy,
                           Vec& p_row) {
    double beta = 1.0, lo = 0.0, hi = std::numeric_limits<double>::infinity();
    const std::size_t n = d_row.size();
    for (int iter = 0; iter < 200; ++iter) {
        double sum = 0.0, weighted = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == self) {
                p_row[j] = 0.0;
                continue;
            }
            const double e = std::exp(-beta * d_row[j]);
            p_row[j] = e;
            sum += e;
            weighted += e * d_row[j];
        }
        if (sum <= 0.0) {  // beta too large; relax
            hi = beta;
            beta = (lo + hi) / 2.0;
            continue;
        }
        const double entropy = std::log(sum) + beta * weighted / sum;
        for (std::size_t j = 0; j < n; ++j) p_row[j] /= sum;
        const double diff = entropy - target_entropy;
        if (std::abs(diff) < 1e-5) return;
        if (diff > 0.0) {  // entropy too high -> sharpen
            lo = beta;
            beta = std::isinf(hi) ? beta * 2.0 : (lo + hi) / 2.0;
        } else {
            hi = beta;
            beta = (lo + hi) / 2.0;
        }
    }
}

inline double kl_divergence(const Mat& P, const Mat& Q) {
    double kl = 0.0;
    for (std::size_t i = 0; i < P.size(); ++i)
        for (std::size_t j = 0; j < P.size(); ++j)
            if (i != j && P[i][j] > 0.0) kl += P[i][j] * std::log(P[i][j] / Q[i][j]);
    return kl;
}

// Student-t affinities in the embedding; also returns the unnormalized
// weights needed by the gradient.
inline void student_t(const Mat& Y, Mat& W, Mat& Q) {
    const std::size_t n = Y.size();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double d = 0.0;
            for (std::size_t k = 0; k < Y[i].size(); ++k)
                d += (Y[i][k] - Y[j][k]) * (Y[i][k] - Y[j][k]);
            const double w = 1.0 / (1.0 + d);
            W[i][j] = W[j][i] = w;
            total += 2.0 * w;
        }
    for (std::size_t i = 0; i < n; ++i) {
        W[i][i] = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            Q[i][j] = i == j ? 0.0 : std::max(W[i][j] / total, 1e-300);
    }
}

}  // namespace tsne_detail

inline Projection tsne_project(const Mat& points, double perplexity = 30.0, int iters = 1000,
                               long long seed = 0) {
    const std::size_t n = points.size();
    if (perplexity <= 0.0) throw DataError("tsne_project: perplexity must be positive");
    if (static_cast<double>(n) <= 3.0 * perplexity)
        throw DataError("tsne_project: need more than 3*perplexity points");

    std::seed_seq seq{seed, static_cast<long long>(0x74736e65)};
    std::mt19937 rng(seq);

    Projection proj;
    Mat X = points;
    {  // jitter coincident points so the bandwidth search is well-posed
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&X](std::size_t a, std::size_t b) { return X[a] < X[b]; });
        std::uniform_real_distribution<double> jit(-1e-10, 1e-10);
        for (std::size_t k = 1; k < n; ++k)
            if (X[order[k]] == X[order[k - 1]]) {
                for (auto& v : X[order[k]]) v += jit(rng);
                proj.jitter_applied = true;
            }
    }

    const Mat D = tsne_detail::squared_distances(X);
    Mat P(n, Vec(n, 0.0));
    {
        Mat cond(n, Vec(n, 0.0));
        const double target = std::log(perplexity);
        for (std::size_t i = 0; i < n; ++i) tsne_detail::perplexity_row(D[i], i, target, cond[i]);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                P[i][j] = (cond[i][j] + cond[j][i]) / (2.0 * static_cast<double>(n));
    }

    Mat Y(n, Vec(2));
    std::normal_distribution<double> init(0.0, 1e-4);
    for (auto& row : Y)
        for (auto& v : row) v = init(rng);

    Mat W(n, Vec(n, 0.0)), Q(n, Vec(n, 0.0));
    tsne_detail::student_t(Y, W, Q);
    proj.kl_initial = tsne_detail::kl_divergence(P, Q);

    const double lr = 200.0;
    Mat velocity(n, Vec(2, 0.0));
    for (int iter = 0; iter < iters; ++iter) {
        const double exaggeration = iter < 100 ? 4.0 : 1.0;
        const double momentum = iter < 250 ? 0.5 : 0.8;
        tsne_detail::student_t(Y, W, Q);
        for (std::size_t i = 0; i < n; ++i) {
            double g0 = 0.0, g1 = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                const double coeff = 4.0 * (exaggeration * P[i][j] - Q[i][j]) * W[i][j];
                g0 += coeff * (Y[i][0] - Y[j][0]);
                g1 += coeff * (Y[i][1] - Y[j][1]);
            }
            velocity[i][0] = momentum * velocity[i][0] - lr * g0;
            velocity[i][1] = momentum * velocity[i][1] - lr * g1;
        }
        double m0 = 0.0, m1 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            Y[i][0] += velocity[i][0];
            Y[i][1] += velocity[i][1];
            m0 += Y[i][0];
            m1 += Y[i][1];
        }
        m0 /= static_cast<double>(n);
        m1 /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            Y[i][0] -= m0;
            Y[i][1] -= m1;
        }
    }

    tsne_detail::student_t(Y, W, Q);
    proj.kl_final = tsne_detail::kl_divergence(P, Q);
    proj.coords = std::move(Y);
    return proj;
}

// ---------------------------------------------------------------------------
// Output formats

inline std::string projection_csv(const Projection& proj, const std::vector<int>& class_ids) {
    if (class_ids.size() != proj.coords.size())
        throw DataError("projection_csv: class id count mismatch");
    std::string s = "index,x,y,class_id\n";
    for (std::size_t i = 0; i < proj.coords.size(); ++i)
        s += std::to_string(i) + "," + fmt9(proj.coords[i][0]) + "," + fmt9(proj.coords[i][1]) +
             "," + std::to_string(class_ids[i]) + "\n";
    return s;
}

inline std::string projection_svg(const Projection& proj, const std::vector<int>& class_ids) {
    if (class_ids.size() != proj.coords.size())
        throw DataError("projection_svg: class id count mismatch");
    static const char* kColors[] = {"#4477aa", "#ee6677", "#228833", "#ccbb44",
                                    "#66ccee", "#aa3377", "#bbbbbb", "#222222"};
    double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
    bool first = true;
    for (const auto& c : proj.coords) {
        if (first) {
            x0 = x1 = c[0];
            y0 = y1 = c[1];
            first = false;
        }
        x0 = std::min(x0, c[0]);
        x1 = std::max(x1, c[0]);
        y0 = std::min(y0, c[1]);
        y1 = std::max(y1, c[1]);
    }
    const double margin = 40.0, span = 800.0 - 2.0 * margin;
    const double sx = x1 > x0 ? span / (x1 - x0) : 0.0;
    const double sy = y1 > y0 ? span / (y1 - y0) : 0.0;
    std::string s =
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" "
        "viewBox=\"0 0 800 800\">\n<rect width=\"800\" height=\"800\" fill=\"white\"/>\n";
    char buf[160];
    for (std::size_t i = 0; i < proj.coords.size(); ++i) {
        const double px = margin + (proj.coords[i][0] - x0) * sx;
        const double py = 800.0 - margin - (proj.coords[i][1] - y0) * sy;
        const int cls = class_ids[i];
        const char* color = kColors[cls >= 0 ? cls % 8 : 6];
        std::snprintf(buf, sizeof buf,
                      "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"%s\" fill-opacity=\"0.7\"/>\n",
                      px, py, color);
        s += buf;
    }
    s += "</svg>\n";
    return s;
}

}  // namespace rudetect
