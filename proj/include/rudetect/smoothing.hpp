// smoothing.hpp — mode-window smoothing of per-frame prediction tracks:
// output[i] = mode of p over [i - floor(w/2), i + ceil(w/2)], truncated at the
// track edges, ties broken by the lowest class id.
#pragma once

#include <algorithm>
#include <map>
#include <vector>

#include "rudetect/common.hpp"
#include "rudetect/labels.hpp"

namespace rudetect {

inline LabelTrack smooth(const LabelTrack& p, int w) {
    if (p.empty()) throw DataError("smooth: empty track");
    if (w < 1) throw DataError("smooth: window must be >= 1");
    const int n = static_cast<int>(p.size());
    const int lo = w / 2, hi = w - lo;
    LabelTrack out(p.size());
    for (int i = 0; i < n; ++i) {
        const int a = std::max(0, i - lo), b = std::min(n - 1, i + hi);
        std::map<int, int> counts;  // ordered keys: first max is the lowest id
        for (int j = a; j <= b; ++j) ++counts[p[j]];
        int best_id = p[a], best_count = -1;
        for (const auto& [id, c] : counts)
            if (c > best_count) {
                best_id = id;
                best_count = c;
            }
        out[i] = best_id;
    }
    return out;
}

}  // namespace rudetect
