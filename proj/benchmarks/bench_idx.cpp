#include <benchmark/benchmark.h>

#include "sepscan/idx.hpp"

namespace {

using namespace sepscan;

void BM_ParseIdxImages(benchmark::State& state) {
  RawImageSet set;
  set.count = uint32_t(state.range(0));
  set.rows = 28;
  set.cols = 28;
  set.pixels.resize(size_t(set.count) * 784);
  for (size_t i = 0; i < set.pixels.size(); ++i)
    set.pixels[i] = uint8_t(i * 131);
  const std::vector<uint8_t> bytes = serialize_idx(set);
  for (auto _ : state) {
    RawImageSet parsed = parse_idx_images(bytes);
    benchmark::DoNotOptimize(parsed.pixels.data());
  }
  state.SetBytesProcessed(int64_t(state.iterations()) * int64_t(bytes.size()));
}

}  // namespace

BENCHMARK(BM_ParseIdxImages)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
