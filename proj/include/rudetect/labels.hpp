// labels.hpp — per-frame label tracks (rudeness class, segment position,
// speaker id) and the CSV format shared by all of them.
#pragma once

#include <string>
#include <vector>

#include "rudetect/common.hpp"

namespace rudetect {

// Rudeness classes. 0 is the only non-rude class; everything >= 1 is rude.
inline constexpr int kClassNone = 0;
inline constexpr int kClassVerbalInsult = 1;
inline constexpr int kClassRaisedTone = 2;
inline constexpr int kClassInterruption = 3;
inline constexpr int kNumRudenessClasses = 4;

inline const char* rudeness_class_name(int id) {
    switch (id) {
        case kClassNone: return "none";
        case kClassVerbalInsult: return "verbal_insult";
        case kClassRaisedTone: return "raised_tone";
        case kClassInterruption: return "interruption";
        default: return "unknown";
    }
}

// Sentence-position classes for the segmentation task; silence frames carry -1.
inline constexpr int kSegSilence = -1;
inline constexpr int kSegBeginning = 0;
inline constexpr int kSegMiddle = 1;
inline constexpr int kSegEnd = 2;

using LabelTrack = std::vector<int>;

inline std::string label_csv(const LabelTrack& labels) {
    std::string s = "frame_index,class_id\n";
    for (std::size_t i = 0; i < labels.size(); ++i)
        s += std::to_string(i) + "," + std::to_string(labels[i]) + "\n";
    return s;
}

inline void write_label_csv(const std::string& path, const LabelTrack& labels) {
    write_text(path, label_csv(labels));
}

inline LabelTrack read_label_csv(const std::string& path) {
    const auto lines = read_lines(path);
    if (lines.empty() || lines[0] != "frame_index,class_id")
        throw DataError("bad label file header in " + path);
    LabelTrack labels;
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        if (trim(lines[ln]).empty()) continue;
        const auto f = split(lines[ln], ',');
        const std::string where = path + ":" + std::to_string(ln + 1);
        if (f.size() != 2) throw DataError("bad label row (" + where + ")");
        if (parse_int(f[0], where) != static_cast<long long>(labels.size()))
            throw DataError("frame_index must increase from 0 (" + where + ")");
        labels.push_back(static_cast<int>(parse_int(f[1], where)));
    }
    return labels;
}

}  // namespace rudetect
