// Audio ingestion and the MFCC-acceleration feature pipeline, checked against
// the independent naive-DFT reference in support/oracles.hpp.
#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "rudetect/audio.hpp"
#include "rudetect/mfcc.hpp"
#include "support/oracles.hpp"

using namespace rudetect;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

Vec random_samples(std::size_t n, unsigned seed, double amp = 0.5) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-amp, amp);
    Vec v(n);
    for (auto& x : v) x = dist(rng);
    return v;
}

// Relative error with a floor so near-zero reference values cannot divide to
// infinity; at normal magnitudes it is the plain relative error.
double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-6);
}

}  // namespace

TEST_CASE("linear resampling maps n samples at 8 kHz to 2n-1 at 16 kHz") {
    const Vec x{0.0, 1.0, 0.0, -1.0};
    const Vec up = resample_linear(x, 8000, 16000);
    REQUIRE(up.size() == 7);
    CHECK(up[0] == Catch::Approx(0.0));
    CHECK(up[1] == Catch::Approx(0.5));   // midpoint of 0 and 1
    CHECK(up[2] == Catch::Approx(1.0));
    CHECK(up[3] == Catch::Approx(0.5));
    CHECK(up[6] == Catch::Approx(-1.0));  // endpoint preserved
}

TEST_CASE("resampling with equal rates is the identity") {
    const Vec x = random_samples(64, 11);
    CHECK(resample_linear(x, 16000, 16000) == x);
    CHECK_THROWS_AS(resample_linear(x, 0, 16000), DataError);
    CHECK_THROWS_AS(resample_linear(x, 16000, -1), DataError);
}

TEST_CASE("WAV round trip preserves samples to 16-bit precision") {
    AudioBuffer buf;
    buf.samples = random_samples(1000, 3);
    buf.samples.front() = 1.5;   // out of range: must clamp, not wrap
    buf.samples.back() = -1.5;
    const std::string path = temp_path("rudetect_roundtrip.wav");
    save_wav(path, buf);
    const AudioBuffer back = load_wav(path);
    REQUIRE(back.samples.size() == buf.samples.size());
    CHECK(back.sample_rate == kSampleRate);
    CHECK(back.samples.front() == Catch::Approx(32767.0 / 32768.0).margin(1e-12));
    CHECK(back.samples.back() == Catch::Approx(-32767.0 / 32768.0).margin(1e-12));
    for (std::size_t i = 1; i + 1 < buf.samples.size(); ++i) {
        const double quantized = std::lrint(buf.samples[i] * 32767.0) / 32768.0;
        REQUIRE(back.samples[i] == Catch::Approx(quantized).margin(1e-12));
    }
    std::filesystem::remove(path);
}

TEST_CASE("stereo WAV input is downmixed by channel mean") {
    // Hand-assembled 2-channel PCM16 file: left = 8000, right = -4000.
    const int frames = 500;
    std::string bytes = "RIFF";
    auto u32 = [&bytes](std::uint32_t v) {
        for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    };
    auto u16 = [&bytes](std::uint16_t v) {
        bytes.push_back(static_cast<char>(v & 0xff));
        bytes.push_back(static_cast<char>((v >> 8) & 0xff));
    };
    u32(36 + frames * 4);
    bytes += "WAVEfmt ";
    u32(16);
    u16(1);                     // PCM
    u16(2);                     // stereo
    u32(16000);
    u32(16000 * 4);
    u16(4);
    u16(16);
    bytes += "data";
    u32(frames * 4);
    for (int i = 0; i < frames; ++i) {
        u16(8000);
        u16(static_cast<std::uint16_t>(-4000));
    }
    const std::string path = temp_path("rudetect_stereo.wav");
    write_text(path, bytes);
    const AudioBuffer buf = load_wav(path);
    REQUIRE(buf.samples.size() == static_cast<std::size_t>(frames));
    for (double s : buf.samples) REQUIRE(s == Catch::Approx(2000.0 / 32768.0));
    std::filesystem::remove(path);
}

TEST_CASE("8 kHz WAV input is resampled to 16 kHz on load") {
    AudioBuffer buf;
    buf.samples = random_samples(800, 5);
    buf.sample_rate = 8000;
    const std::string path = temp_path("rudetect_8k.wav");
    save_wav(path, buf);
    const AudioBuffer back = load_wav(path);
    CHECK(back.sample_rate == kSampleRate);
    CHECK(back.samples.size() == 2 * buf.samples.size() - 1);
    std::filesystem::remove(path);
}

TEST_CASE("malformed audio files are rejected") {
    const std::string path = temp_path("rudetect_notwav.wav");
    write_text(path, "definitely not RIFF data");
    CHECK_THROWS_AS(load_wav(path), DataError);
    CHECK_THROWS_AS(load_wav(temp_path("rudetect_missing_file.wav")), DataError);
    std::filesystem::remove(path);
}

TEST_CASE("frame count follows the 400/160 framing formula") {
    CHECK(frame_count(399) == 0);
    CHECK(frame_count(400) == 1);
    CHECK(frame_count(559) == 1);
    CHECK(frame_count(560) == 2);
    CHECK(frame_count(16000) == 98);
}

TEST_CASE("extract_mfcc validates its input") {
    AudioBuffer buf;
    buf.samples = random_samples(800, 7);
    buf.sample_rate = 8000;
    CHECK_THROWS_AS(extract_mfcc(buf), DataError);  // must be 16 kHz after ingestion
    buf.sample_rate = kSampleRate;
    buf.samples.resize(200);
    CHECK_THROWS_AS(extract_mfcc(buf), DataError);  // shorter than one window
}

TEST_CASE("MFCC matches the naive-DFT reference implementation") {
    for (unsigned seed : {101u, 102u, 103u}) {
        AudioBuffer buf;
        buf.samples = random_samples(16000, seed);
        const auto got = extract_mfcc(buf);
        const auto want = oracle::mfcc_reference(buf.samples);
        REQUIRE(got.size() == want.size());
        double worst = 0.0;
        for (std::size_t f = 0; f < got.size(); ++f)
            for (int c = 0; c < kNumCoeffs; ++c)
                worst = std::max(worst, rel_err(got[f].c[c], want[f][c]));
        CHECK(worst < 1e-6);
    }
}

TEST_CASE("acceleration features match the reference delta applied twice") {
    AudioBuffer buf;
    buf.samples = random_samples(8000, 21);
    const auto mfcc = extract_mfcc(buf);
    const FrameFeatureTrack got = acceleration_features(mfcc);

    const auto ref_mfcc = oracle::mfcc_reference(buf.samples);
    const auto ref_accel = oracle::delta_reference(oracle::delta_reference(ref_mfcc));
    REQUIRE(got.frames.size() == ref_accel.size());
    double worst = 0.0;
    for (std::size_t f = 0; f < got.frames.size(); ++f) {
        REQUIRE(got.frames[f].size() == kFeatureDim);
        for (int j = 0; j < kFeatureDim; ++j)  // column 0 (first coefficient) is dropped
            worst = std::max(worst, rel_err(got.frames[f][j], ref_accel[f][j + 1]));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("acceleration of a constant trajectory is exactly zero") {
    std::vector<MfccFrame> mfcc(10);
    for (auto& f : mfcc)
        for (int c = 0; c < kNumCoeffs; ++c) f.c[c] = 3.25 + c;
    const FrameFeatureTrack track = acceleration_features(mfcc);
    for (const auto& row : track.frames)
        for (double v : row) REQUIRE(v == 0.0);
    CHECK_THROWS_AS(acceleration_features(std::vector<MfccFrame>(4)), DataError);
}

TEST_CASE("delaying audio by whole hops shifts the frames") {
    const int k = 3;  // hops of delay
    AudioBuffer orig;
    orig.samples = random_samples(8000, 33);
    AudioBuffer delayed;
    delayed.samples.assign(k * kHopLen, 0.0);
    delayed.samples.insert(delayed.samples.end(), orig.samples.begin(), orig.samples.end());

    const auto a = acceleration_features(extract_mfcc(orig));
    const auto b = acceleration_features(extract_mfcc(delayed));
    const int n = static_cast<int>(a.frames.size());
    // The delta stencil reaches 4 frames out, so edge-replicated frames differ.
    for (int f = 4; f < n - 4; ++f)
        for (int j = 0; j < kFeatureDim; ++j)
            REQUIRE(std::abs(b.frames[f + k][j] - a.frames[f][j]) < 1e-9);
}

TEST_CASE("a constant gain leaves the acceleration features unchanged") {
    AudioBuffer orig;
    orig.samples = random_samples(8000, 44, 0.2);
    AudioBuffer louder = orig;
    for (auto& s : louder.samples) s *= 2.5;

    const auto a = acceleration_features(extract_mfcc(orig));
    const auto b = acceleration_features(extract_mfcc(louder));
    for (std::size_t f = 0; f < a.frames.size(); ++f)
        for (int j = 0; j < kFeatureDim; ++j)
            REQUIRE(std::abs(a.frames[f][j] - b.frames[f][j]) < 1e-6);
}

TEST_CASE("feature scaling maps the training range onto [0,1] and clamps") {
    FrameFeatureTrack train;
    train.frames.assign(2, Vec(kFeatureDim, 0.0));
    for (int j = 0; j < kFeatureDim; ++j) {
        train.frames[0][j] = -1.0;
        train.frames[1][j] = 3.0;
    }
    train.frames[0][5] = 2.0;  // dimension 5 is flat: [2, 2]
    train.frames[1][5] = 2.0;
    const ScalingBounds bounds = fit_scaling({train});
    CHECK(bounds.lo[0] == -1.0);
    CHECK(bounds.hi[0] == 3.0);

    FrameFeatureTrack query;
    query.frames.assign(1, Vec(kFeatureDim, 1.0));
    query.frames[0][1] = -5.0;  // below the range
    query.frames[0][2] = 9.0;   // above the range
    const FrameFeatureTrack scaled = apply_scaling(query, bounds);
    CHECK(scaled.frames[0][0] == Catch::Approx(0.5));
    CHECK(scaled.frames[0][1] == 0.0);
    CHECK(scaled.frames[0][2] == 1.0);
    CHECK(scaled.frames[0][5] == 0.0);  // flat dimension maps to 0
    for (double v : scaled.frames[0]) {
        REQUIRE(v >= 0.0);
        REQUIRE(v <= 1.0);
    }
    CHECK_THROWS_AS(fit_scaling({}), DataError);
}

TEST_CASE("feature and bounds CSV files round trip") {
    AudioBuffer buf;
    buf.samples = random_samples(4000, 55);
    const FrameFeatureTrack track = acceleration_features(extract_mfcc(buf));
    const std::string path = temp_path("rudetect_feats.csv");
    write_feature_csv(path, track);
    const FrameFeatureTrack back = read_feature_csv(path);
    REQUIRE(back.frames.size() == track.frames.size());
    for (std::size_t f = 0; f < track.frames.size(); ++f)
        for (int j = 0; j < kFeatureDim; ++j)
            REQUIRE(back.frames[f][j] == Catch::Approx(track.frames[f][j]).epsilon(1e-8));
    std::filesystem::remove(path);

    const ScalingBounds bounds = fit_scaling({track});
    const std::string bpath = temp_path("rudetect_bounds.csv");
    write_bounds_csv(bpath, bounds);
    const ScalingBounds bback = read_bounds_csv(bpath);
    for (int j = 0; j < kFeatureDim; ++j) {
        REQUIRE(bback.lo[j] == Catch::Approx(bounds.lo[j]).epsilon(1e-8));
        REQUIRE(bback.hi[j] == Catch::Approx(bounds.hi[j]).epsilon(1e-8));
    }
    std::filesystem::remove(bpath);

    write_text(path, "bad header\n1,2,3\n");
    CHECK_THROWS_AS(read_feature_csv(path), DataError);
    std::filesystem::remove(path);
}
