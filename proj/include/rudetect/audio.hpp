// audio.hpp — RIFF WAV (PCM16) reading/writing, stereo downmix and linear resampling.
#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "rudetect/common.hpp"

namespace rudetect {

inline constexpr int kSampleRate = 16000;

struct AudioBuffer {
    Vec samples;  // in [-1, 1]
    int sample_rate = kSampleRate;
};

// Output sample k sits at input position k*from/to; output length is
// floor((n-1)*to/from)+1, so 8 kHz -> 16 kHz maps n samples to 2n-1.
inline Vec resample_linear(const Vec& x, int from_rate, int to_rate) {
    if (from_rate <= 0 || to_rate <= 0) throw DataError("resample: rates must be positive");
    if (from_rate == to_rate || x.empty()) return x;
    const long long n = static_cast<long long>(x.size());
    const long long m = (n - 1) * to_rate / from_rate + 1;
    Vec out(static_cast<std::size_t>(m));
    for (long long k = 0; k < m; ++k) {
        const double pos = static_cast<double>(k) * from_rate / to_rate;
        long long i = static_cast<long long>(pos);
        if (i >= n - 1) {
            out[k] = x[n - 1];
            continue;
        }
        const double frac = pos - static_cast<double>(i);
        out[k] = x[i] * (1.0 - frac) + x[i + 1] * frac;
    }
    return out;
}

namespace wav_detail {

inline std::uint32_t rd_u32(const unsigned char* p) {
    return p[0] | (p[1] << 8) | (p[2] << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}
inline std::uint16_t rd_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}
inline void wr_u32(std::string& s, std::uint32_t v) {
    s.push_back(static_cast<char>(v & 0xff));
    s.push_back(static_cast<char>((v >> 8) & 0xff));
    s.push_back(static_cast<char>((v >> 16) & 0xff));
    s.push_back(static_cast<char>((v >> 24) & 0xff));
}
inline void wr_u16(std::string& s, std::uint16_t v) {
    s.push_back(static_cast<char>(v & 0xff));
    s.push_back(static_cast<char>((v >> 8) & 0xff));
}

}  // namespace wav_detail

// Reads a PCM16 RIFF WAV. Multi-channel input is downmixed by channel mean and
// any sample rate is linearly resampled to 16 kHz; samples are scaled by 1/32768.
inline AudioBuffer load_wav(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open audio file " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    const std::size_t n = bytes.size();
    using namespace wav_detail;

    if (n < 12 || std::memcmp(p, "RIFF", 4) != 0 || std::memcmp(p + 8, "WAVE", 4) != 0)
        throw DataError("not a RIFF WAV file: " + path);

    int channels = 0, rate = 0, bits = 0, format = 0;
    std::size_t data_off = 0, data_len = 0;
    std::size_t off = 12;
    while (off + 8 <= n) {
        const std::size_t chunk_len = rd_u32(p + off + 4);
        const std::size_t body = off + 8;
        if (std::memcmp(p + off, "fmt ", 4) == 0) {
            if (body + 16 > n) throw DataError("truncated fmt chunk: " + path);
            format = rd_u16(p + body);
            channels = rd_u16(p + body + 2);
            rate = static_cast<int>(rd_u32(p + body + 4));
            bits = rd_u16(p + body + 14);
        } else if (std::memcmp(p + off, "data", 4) == 0) {
            data_off = body;
            data_len = chunk_len;
        }
        off = body + chunk_len + (chunk_len & 1);  // chunks are word-aligned
    }
    if (format == 0 || data_off == 0) throw DataError("missing fmt/data chunk: " + path);
    if (format != 1 || bits != 16)
        throw DataError("unsupported encoding (want PCM16): " + path);
    if (channels < 1) throw DataError("bad channel count: " + path);
    if (data_off + data_len > n) throw DataError("truncated data chunk: " + path);

    const std::size_t total = data_len / 2;
    const std::size_t frames = total / static_cast<std::size_t>(channels);
    if (frames == 0) throw DataError("zero-length audio: " + path);

    Vec mono(frames);
    for (std::size_t f = 0; f < frames; ++f) {
        double acc = 0.0;
        for (int c = 0; c < channels; ++c) {
            const unsigned char* q = p + data_off + 2 * (f * channels + c);
            const std::int16_t v = static_cast<std::int16_t>(q[0] | (q[1] << 8));
            acc += static_cast<double>(v);
        }
        mono[f] = acc / channels / 32768.0;
    }

    AudioBuffer buf;
    buf.samples = resample_linear(mono, rate, kSampleRate);
    buf.sample_rate = kSampleRate;
    return buf;
}

// Writes mono PCM16; samples are clamped to [-1, 1].
inline void save_wav(const std::string& path, const AudioBuffer& audio) {
    using namespace wav_detail;
    const std::uint32_t nsamples = static_cast<std::uint32_t>(audio.samples.size());
    const std::uint32_t data_len = nsamples * 2;
    std::string out;
    out.reserve(44 + data_len);
    out += "RIFF";
    wr_u32(out, 36 + data_len);
    out += "WAVEfmt ";
    wr_u32(out, 16);
    wr_u16(out, 1);  // PCM
    wr_u16(out, 1);  // mono
    wr_u32(out, static_cast<std::uint32_t>(audio.sample_rate));
    wr_u32(out, static_cast<std::uint32_t>(audio.sample_rate) * 2);
    wr_u16(out, 2);
    wr_u16(out, 16);
    out += "data";
    wr_u32(out, data_len);
    for (double s : audio.samples) {
        const double c = s < -1.0 ? -1.0 : (s > 1.0 ? 1.0 : s);
        const auto v = static_cast<std::int16_t>(std::lrint(c * 32767.0));
        wr_u16(out, static_cast<std::uint16_t>(v));
    }
    write_text(path, out);
}

}  // namespace rudetect
