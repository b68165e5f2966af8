// Copyright 2026 The rxvc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "doctest.h"
#include "fixtures.h"
#include "rxvc/checkpoint.h"
#include "rxvc/errors.h"
#include "rxvc/inference.h"

namespace rxvc {
namespace {

namespace fs = std::filesystem;

std::vector<double> Sine(double hz, double seconds, int rate) {
  std::vector<double> x(static_cast<size_t>(seconds * rate));
  for (size_t n = 0; n < x.size(); ++n)
    x[n] = 0.5 * std::sin(2.0 * std::numbers::pi * hz * n / rate);
  return x;
}

// Frequency of the largest Hann-windowed DFT bin of the middle segment,
// evaluated directly at 1 Hz spacing up to max_hz.
double DominantFrequency(const std::vector<double>& x, int rate, int max_hz) {
  const size_t len = 8192, start = (x.size() - len) / 2;
  double best = -1.0, best_hz = 0.0;
  for (int hz = 1; hz <= max_hz; ++hz) {
    std::complex<double> acc = 0.0;
    for (size_t n = 0; n < len; ++n) {
      const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / len);
      acc += w * x[start + n] *
             std::polar(1.0, -2.0 * std::numbers::pi * hz * double(n) / rate);
    }
    if (std::abs(acc) > best) {
      best = std::abs(acc);
      best_hz = hz;
    }
  }
  return best_hz;
}

TEST_CASE("griffin-lim round trip of a sine keeps its pitch") {
  const FeatureConfig fc;
  const auto x = Sine(440.0, 1.0, fc.sample_rate);
  const MelSpectrogram mel = ComputeMel(x, fc.sample_rate, fc);
  const Waveform y = MelToWaveform(mel, 60, fc);
  REQUIRE(y.samples.size() ==
          static_cast<size_t>(mel.num_frames() - 1) * fc.hop_samples);
  const double peak = DominantFrequency(y.samples, fc.sample_rate, 2000);
  const double band = (HzToMel(fc.fmax_hz) - HzToMel(fc.fmin_hz)) /
                      (fc.num_mels + 1);
  CHECK(std::abs(HzToMel(peak) - HzToMel(440.0)) <= band);
  double loudest = 0.0;
  for (double s : y.samples) loudest = std::max(loudest, std::abs(s));
  CHECK(loudest <= 1.0);
}

TEST_CASE("griffin-lim edge cases") {
  const FeatureConfig fc;
  MelSpectrogram floor;
  floor.frames = ag::RowMatrix::Constant(50, fc.num_mels, fc.LogFloor());
  const Waveform quiet = MelToWaveform(floor, 30, fc);
  double energy = 0.0;
  for (double s : quiet.samples) energy += s * s;
  CHECK(std::sqrt(energy / quiet.samples.size()) < 1e-3);

  const Waveform zero_phase = MelToWaveform(floor, 0, fc);
  CHECK(zero_phase.samples.size() == 49u * fc.hop_samples);
  CHECK(zero_phase.sample_rate == fc.sample_rate);

  MelSpectrogram wrong;
  wrong.frames = ag::RowMatrix::Zero(5, fc.num_mels + 1);
  CHECK_THROWS_AS(MelToWaveform(wrong, 1, fc), InvalidInput);
}

struct ConverterFixture {
  ConverterFixture() {
    const testing::TinySetup setup = testing::MakeTinySetup("rxvc_infer_corpus");
    cfg = testing::TinyRunConfig();
    Trainer trainer(cfg.model, cfg.training, setup.corpus);
    trainer.Step();
    ckpt_path = (fs::temp_directory_path() / "rxvc_infer_ckpt.bin").string();
    SaveCheckpoint(ckpt_path, cfg, trainer.step(), setup.tokenizer,
                   trainer.model(), trainer.optim_g(), trainer.optim_d());
    source = SynthesizeUtterance(0, 3.0, 11, cfg.features.sample_rate);
    reference = SynthesizeUtterance(1, 0.9, 12, cfg.features.sample_rate);
  }
  RunConfig cfg;
  std::string ckpt_path;
  Waveform source, reference;
};

TEST_CASE_FIXTURE(ConverterFixture, "conversion contracts") {
  const Converter converter = Converter::Load(ckpt_path);
  const GriffinLimVocoder vocoder(2, cfg.features);
  const Waveform one[] = {reference};
  const ConversionResult a = converter.Convert(source, one, vocoder);
  CHECK(a.mel_hat.num_frames() == 151);
  CHECK(a.mel_hat.num_mels() == 80);
  CHECK(a.waveform.samples.size() == 150u * cfg.features.hop_samples);

  const ConversionResult again = converter.Convert(source, one, vocoder);
  CHECK(a.mel_hat.frames == again.mel_hat.frames);
  CHECK(a.waveform.samples == again.waveform.samples);

  const Waveform twice[] = {reference, reference};
  const ConversionResult dup = converter.Convert(source, twice, vocoder);
  CHECK((dup.mel_hat.frames - a.mel_hat.frames).cwiseAbs().maxCoeff() < 1e-5);
  REQUIRE(dup.boundaries.size() == 2);
  CHECK(dup.attention.cols() == 2 * a.attention.cols());

  for (double seconds : {0.05, 0.5, 1.3}) {
    const Waveform src =
        SynthesizeUtterance(1, seconds, 5, cfg.features.sample_rate);
    const ConversionResult r = converter.Convert(src, one, vocoder);
    CHECK(r.mel_hat.num_frames() ==
          cfg.features.NumFrames(src.samples.size()));
  }
}

TEST_CASE_FIXTURE(ConverterFixture, "conversion errors and file outputs") {
  const Converter converter = Converter::Load(ckpt_path);
  const GriffinLimVocoder vocoder(1, cfg.features);
  Waveform empty;
  empty.sample_rate = cfg.features.sample_rate;
  const Waveform refs[] = {reference, empty};
  CHECK_THROWS_AS(converter.Convert(source, refs, vocoder), InvalidInput);
  CHECK_THROWS_AS(converter.Convert(source, {}, vocoder), InvalidInput);

  const fs::path dir = fs::temp_directory_path() / "rxvc_infer_io";
  fs::create_directories(dir);
  WriteWav((dir / "src.wav").string(), source);
  WriteWav((dir / "ref.wav").string(), reference);
  ConversionRequest req;
  req.source_audio_path = (dir / "src.wav").string();
  req.reference_audio_paths = {(dir / "ref.wav").string()};
  req.checkpoint_path = (dir / "missing.bin").string();
  req.output_path = (dir / "out.wav").string();
  req.n_griffin_lim_iters = 1;
  CHECK_THROWS_AS(Convert(req), IncompatibleCheckpoint);

  req.checkpoint_path = ckpt_path;
  req.mel_dump_path = (dir / "mel.bin").string();
  req.attention_dump_path = (dir / "attn.txt").string();
  const ConversionResult r = Convert(req);
  const Waveform written = ReadWav(req.output_path);
  CHECK(written.sample_rate == 16000);
  CHECK(written.samples.size() == r.waveform.samples.size());
  CHECK(ReadMelCache(req.mel_dump_path).num_frames() == 151);
  const AlignmentDump dump = ReadAlignmentDump(req.attention_dump_path);
  CHECK(dump.source_frames == 151);
  CHECK(dump.BlockMass(0) == doctest::Approx(1.0).epsilon(1e-4));

  req.reference_audio_paths.clear();
  CHECK_THROWS_AS(Convert(req), InvalidInput);
}

}  // namespace
}  // namespace rxvc
