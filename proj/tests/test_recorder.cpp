// Copyright 2026 The cvqos Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <filesystem>
#include <mutex>
#include <set>
#include <stdexcept>

#include "cvqos/error.hpp"
#include "cvqos/recorder.hpp"

namespace cvqos::recorder {
namespace {

using namespace std::chrono_literals;
namespace fs = std::filesystem;

fs::path temp_file(const char* name) { return fs::temp_directory_path() / name; }

TEST(Crc32, StandardCheckValue) {
  const std::string s = "123456789";
  EXPECT_EQ(crc32({reinterpret_cast<const std::uint8_t*>(s.data()), s.size()}), 0xCBF43926u);
}

TEST(SyntheticSource, PayloadIsAFunctionOfSeedAndIndex) {
  std::vector<std::uint8_t> a(256), b(256), c(256);
  SyntheticSource::payload_for(1, 5, a);
  SyntheticSource::payload_for(1, 5, b);
  SyntheticSource::payload_for(1, 6, c);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
}

TEST(Capture, ZeroDurationProducesNothing) {
  SyntheticSource src(1024, 1);
  const auto path = temp_file("cvqos_cap_empty.cvqb");
  const auto r = run_capture(src, path, 0ms);
  EXPECT_EQ(r.blocks_produced, 0u);
  EXPECT_EQ(r.blocks_lost, 0u);
  EXPECT_TRUE(read_capture(path).empty());
  fs::remove(path);
}

TEST(Capture, ShortRunIsGaplessAndVerifiable) {
  SyntheticSource src(4096, 9);
  const auto path = temp_file("cvqos_cap_short.cvqb");
  const auto r = run_capture(src, path, 1000ms);
  EXPECT_EQ(r.blocks_produced, 100u);
  EXPECT_EQ(r.blocks_lost, 0u);
  EXPECT_EQ(r.blocks_captured, 100u);
  const auto frames = read_capture(path);
  ASSERT_EQ(frames.size(), 100u);
  std::vector<std::uint8_t> expected(4096);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    EXPECT_EQ(frames[i].sequence_index, i);
    EXPECT_TRUE(frames[i].checksum_ok);
    SyntheticSource::payload_for(9, i, expected);
    EXPECT_EQ(frames[i].payload, expected);
    if (i > 0) EXPECT_GT(frames[i].start_time_ns, frames[i - 1].start_time_ns);
  }
  fs::remove(path);
}

TEST(Capture, PartialTrailingBufferIsFlushed) {
  SyntheticSource src(512, 2);
  const auto path = temp_file("cvqos_cap_tail.cvqb");
  const auto r = run_capture(src, path, 250ms);  // 25 blocks: two full buffers plus five
  EXPECT_EQ(r.blocks_produced, 25u);
  EXPECT_EQ(r.blocks_captured, 25u);
  EXPECT_EQ(read_capture(path).size(), 25u);
  fs::remove(path);
}

TEST(Capture, ManySerializersStillWriteEveryBlockOnce) {
  SyntheticSource src(2048, 4);
  const auto path = temp_file("cvqos_cap_many.cvqb");
  CaptureOptions o;
  o.serializers = 5;
  const auto r = run_capture(src, path, 500ms, o);
  EXPECT_EQ(r.blocks_lost, 0u);
  std::set<std::uint64_t> seen;
  for (const auto& f : read_capture(path)) {
    EXPECT_TRUE(f.checksum_ok);
    EXPECT_TRUE(seen.insert(f.sequence_index).second);
  }
  EXPECT_EQ(seen.size(), 50u);
  fs::remove(path);
}

TEST(Capture, ThrottledSinkLosesWholeBuffersAndAccountsForThem) {
  SyntheticSource src(1024, 3);
  const auto path = temp_file("cvqos_cap_slow.cvqb");
  CaptureOptions o;
  o.sink_delay_per_block = 30ms;  // 10 blocks in 100 ms take 150 ms with 2 workers
  const auto r = run_capture(src, path, 2000ms, o);
  EXPECT_GT(r.blocks_lost, 0u);
  EXPECT_EQ(r.blocks_captured + r.blocks_lost, r.blocks_produced);
  const auto frames = read_capture(path);
  EXPECT_EQ(frames.size(), r.blocks_captured);
  std::set<std::uint64_t> seen;
  for (const auto& f : frames) {
    EXPECT_TRUE(f.checksum_ok);
    EXPECT_TRUE(seen.insert(f.sequence_index).second);
  }
  fs::remove(path);
}

class FailingSink : public CaptureSink {
 public:
  explicit FailingSink(int ok_writes) : ok_(ok_writes) {}
  void write_at(std::uint64_t, std::span<const std::uint8_t>) override {
    std::lock_guard lock(mu_);
    if (ok_-- <= 0) throw std::runtime_error("disk full");
  }
  void mark_partial(const std::string& reason) override { reason_ = reason; }
  void finish(std::uint64_t) override { finished_ = true; }

  std::string reason_;
  bool finished_ = false;

 private:
  std::mutex mu_;
  int ok_;
};

TEST(Capture, SinkFailureAbortsWithAPartialMarker) {
  SyntheticSource src(256, 1);
  FailingSink sink(15);
  const auto r = run_capture(src, sink, 1000ms);
  EXPECT_TRUE(r.aborted);
  EXPECT_EQ(r.abort_reason, "disk full");
  EXPECT_EQ(sink.reason_, "disk full");
  EXPECT_FALSE(sink.finished_);
  EXPECT_EQ(r.blocks_captured + r.blocks_lost, r.blocks_produced);
  EXPECT_LT(r.blocks_captured, r.blocks_produced);
}

TEST(Capture, ZeroSerializersIsAConfigError) {
  SyntheticSource src(256, 1);
  CaptureOptions o;
  o.serializers = 0;
  FailingSink sink(0);
  EXPECT_THROW(run_capture(src, sink, 100ms, o), Error);
}

TEST(ReadCapture, DetectsCorruptionAndTruncation) {
  SyntheticSource src(300, 5);
  const auto path = temp_file("cvqos_cap_corrupt.cvqb");
  run_capture(src, path, 100ms);
  const auto size = fs::file_size(path);
  {
    std::FILE* f = std::fopen(path.c_str(), "r+b");
    ASSERT_NE(f, nullptr);
    std::fseek(f, static_cast<long>(kFrameHeaderSize + 10), SEEK_SET);
    const int original = std::fgetc(f);
    std::fseek(f, static_cast<long>(kFrameHeaderSize + 10), SEEK_SET);
    std::fputc(original ^ 0xFF, f);
    std::fclose(f);
  }
  const auto frames = read_capture(path);
  ASSERT_EQ(frames.size(), 10u);
  EXPECT_FALSE(frames[0].checksum_ok);
  for (std::size_t i = 1; i < frames.size(); ++i) EXPECT_TRUE(frames[i].checksum_ok);
  fs::resize_file(path, size - 5);
  try {
    read_capture(path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::Capture);
  }
  fs::remove(path);
}

}  // namespace
}  // namespace cvqos::recorder
