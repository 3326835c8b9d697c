// naive_bayes.hpp — Bernoulli Naive Bayes over binary bag-of-words phrase
// vectors. alpha=0 gives the pure MLE, whose zero likelihoods can drive a
// posterior to exactly 0 for phrases containing class-exclusive words; the
// classifier surfaces that case explicitly instead of hiding it.
#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rudetect/common.hpp"
#include "rudetect/corpus.hpp"

namespace rudetect {

inline std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (unsigned char ch : text) {
        if (std::isalnum(ch)) {
            cur += static_cast<char>(std::tolower(ch));
        } else if (!cur.empty()) {
            tokens.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(cur);
    return tokens;
}

struct NbModel {
    double alpha = 1.0;
    double prior_rude = 0.5;  // prior_not_rude = 1 - prior_rude
    std::vector<std::string> vocab;  // lexicographic
    Vec p_rude, p_not;               // p(x_i = 1 | class), aligned with vocab
};

inline NbModel train_nb(const std::vector<Transcript>& transcripts, double alpha) {
    if (alpha < 0.0) throw DataError("train_nb: alpha must be >= 0");
    long long n_rude = 0, n_not = 0;
    std::map<std::string, std::pair<long long, long long>> counts;  // word -> (rude, not)
    for (const auto& t : transcripts)
        for (const auto& phrase : t) {
            (phrase.rude ? n_rude : n_not) += 1;
            std::vector<std::string> tokens = tokenize(phrase.text);
            std::sort(tokens.begin(), tokens.end());
            tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
            for (const auto& w : tokens)
                (phrase.rude ? counts[w].first : counts[w].second) += 1;
        }
    if (n_rude == 0 || n_not == 0)
        throw DataError("train_nb: both rude and not_rude phrases are required");

    NbModel m;
    m.alpha = alpha;
    m.prior_rude = static_cast<double>(n_rude) / (n_rude + n_not);
    for (const auto& [word, c] : counts) {
        m.vocab.push_back(word);
        m.p_rude.push_back((c.first + alpha) / (n_rude + 2.0 * alpha));
        m.p_not.push_back((c.second + alpha) / (n_not + 2.0 * alpha));
    }
    return m;
}

inline std::vector<std::uint8_t> phrase_vector(const NbModel& m, const std::string& text) {
    std::vector<std::uint8_t> x(m.vocab.size(), 0);
    for (const auto& tok : tokenize(text)) {
        const auto it = std::lower_bound(m.vocab.begin(), m.vocab.end(), tok);
        if (it != m.vocab.end() && *it == tok) x[it - m.vocab.begin()] = 1;
    }
    return x;
}

struct Posterior {
    double p_rude = 0.0;
    double p_not_rude = 0.0;
    bool both_zero = false;  // only reachable with alpha = 0
};

// Log-domain; a zero factor is tracked exactly rather than as -inf so the
// alpha=0 pathology reports exact zeros.
inline Posterior posterior(const NbModel& m, const std::vector<std::uint8_t>& x) {
    if (x.size() != m.vocab.size()) throw DataError("posterior: dimension mismatch");
    bool zero_rude = false, zero_not = false;
    double log_rude = std::log(m.prior_rude), log_not = std::log(1.0 - m.prior_rude);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double qr = x[i] ? m.p_rude[i] : 1.0 - m.p_rude[i];
        const double qn = x[i] ? m.p_not[i] : 1.0 - m.p_not[i];
        if (qr == 0.0) zero_rude = true; else log_rude += std::log(qr);
        if (qn == 0.0) zero_not = true; else log_not += std::log(qn);
    }
    Posterior p;
    if (zero_rude && zero_not) {
        p.both_zero = true;
        return p;
    }
    if (zero_rude) {
        p.p_not_rude = 1.0;
        return p;
    }
    if (zero_not) {
        p.p_rude = 1.0;
        return p;
    }
    p.p_rude = 1.0 / (1.0 + std::exp(log_not - log_rude));
    p.p_not_rude = 1.0 - p.p_rude;
    return p;
}

// argmax posterior; ties (and the both-zero case) fall to not_rude.
inline bool classify_phrase(const NbModel& m, const std::string& text) {
    const Posterior p = posterior(m, phrase_vector(m, text));
    if (p.both_zero) return false;
    return p.p_rude > p.p_not_rude;
}

inline void save_nb_model(const std::string& path, const NbModel& m) {
    std::string s = "alpha=" + fmt9(m.alpha) + "\n";
    s += "prior_rude=" + fmt9(m.prior_rude) + "\n";
    for (std::size_t i = 0; i < m.vocab.size(); ++i)
        s += m.vocab[i] + "," + fmt9(m.p_rude[i]) + "," + fmt9(m.p_not[i]) + "\n";
    write_text(path, s);
}

inline NbModel load_nb_model(const std::string& path) {
    const auto lines = read_lines(path);
    if (lines.size() < 2 || lines[0].rfind("alpha=", 0) != 0 ||
        lines[1].rfind("prior_rude=", 0) != 0)
        throw DataError("bad NB model file " + path);
    NbModel m;
    m.alpha = parse_real(lines[0].substr(6), path);
    m.prior_rude = parse_real(lines[1].substr(11), path);
    for (std::size_t ln = 2; ln < lines.size(); ++ln) {
        if (trim(lines[ln]).empty()) continue;
        const auto f = split(lines[ln], ',');
        const std::string where = path + ":" + std::to_string(ln + 1);
        if (f.size() != 3) throw DataError("bad NB model row (" + where + ")");
        if (!m.vocab.empty() && !(m.vocab.back() < f[0]))
            throw DataError("NB vocabulary out of order (" + where + ")");
        m.vocab.push_back(f[0]);
        m.p_rude.push_back(parse_real(f[1], where));
        m.p_not.push_back(parse_real(f[2], where));
    }
    return m;
}

}  // namespace rudetect
