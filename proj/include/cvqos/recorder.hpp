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

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

// Real-time block capture: a producer fills fixed-size blocks into the active
// half of a buffer pair; when the active half holds a full buffer's worth of
// blocks the halves swap and serializer workers drain the inactive half to
// storage in parallel.
//
// Capture file layout (little-endian), one frame per block, in
// sequence_index order:
//   u32 magic | u64 sequence_index | u64 start_time_ns | u32 length | u32 crc32 | payload[length]

namespace cvqos::recorder {

inline constexpr std::uint32_t kFrameMagic = 0x42515643;  // "CVQB" on disk
inline constexpr std::size_t kFrameHeaderSize = 28;
inline constexpr std::uint32_t kBlockDurationMs = 10;
inline constexpr std::size_t kBlocksPerBuffer = 10;

struct Block {
  std::uint64_t sequence_index = 0;
  std::uint64_t start_time_ns = 0;
  std::uint32_t duration_ms = kBlockDurationMs;
  /// Source metadata, e.g. the carrier the source was tuned to.
  std::uint32_t tag = 0;
  std::vector<std::uint8_t> samples;
};

class BlockSource {
 public:
  virtual ~BlockSource() = default;
  virtual std::size_t block_bytes() const = 0;
  /// Fills `out` with block `index`; `out.samples` is pre-sized.
  virtual void produce(std::uint64_t index, std::uint64_t start_time_ns, Block& out) = 0;
  /// Invoked by the producer right after a buffer swap, with the tag of the
  /// last block of the buffer that was handed off.
  virtual void reconfigure(std::uint32_t /*last_tag*/) {}
};

/// Deterministic pseudo-random payloads; payload_for() lets readers
/// regenerate any block for byte comparison.
class SyntheticSource : public BlockSource {
 public:
  SyntheticSource(std::size_t block_bytes, std::uint64_t seed) : block_bytes_(block_bytes), seed_(seed) {}

  std::size_t block_bytes() const override { return block_bytes_; }
  void produce(std::uint64_t index, std::uint64_t start_time_ns, Block& out) override;

  static void payload_for(std::uint64_t seed, std::uint64_t index, std::span<std::uint8_t> out);

 private:
  std::size_t block_bytes_;
  std::uint64_t seed_;
};

class CaptureSink {
 public:
  virtual ~CaptureSink() = default;
  /// Writes one whole frame at `offset`. Throws on failure.
  virtual void write_at(std::uint64_t offset, std::span<const std::uint8_t> frame) = 0;
  virtual void mark_partial(const std::string& reason) = 0;
  virtual void finish(std::uint64_t total_bytes) = 0;
};

/// File sink using pwrite(2). A failed capture leaves `<path>.partial` next to
/// the data file with the failure reason.
class FileSink : public CaptureSink {
 public:
  explicit FileSink(const std::filesystem::path& path);
  ~FileSink() override;
  FileSink(const FileSink&) = delete;
  FileSink& operator=(const FileSink&) = delete;

  void write_at(std::uint64_t offset, std::span<const std::uint8_t> frame) override;
  void mark_partial(const std::string& reason) override;
  void finish(std::uint64_t total_bytes) override;

 private:
  std::filesystem::path path_;
  int fd_ = -1;
};

struct CaptureOptions {
  std::size_t serializers = 2;
  std::size_t blocks_per_buffer = kBlocksPerBuffer;
  /// Extra latency per written frame; simulates slow storage.
  std::chrono::microseconds sink_delay_per_block{0};
};

struct CaptureReport {
  std::uint64_t blocks_produced = 0;
  std::uint64_t blocks_captured = 0;
  std::uint64_t blocks_lost = 0;
  std::uint64_t buffer_swaps = 0;
  std::chrono::nanoseconds max_swap_wait{0};
  bool aborted = false;
  std::string abort_reason;
};

/// Runs the source in real time for `duration` (duration / 10 ms blocks).
/// A swap that finds the inactive buffer still draining past the next block
/// deadline drops the full buffer and counts its blocks as lost.
CaptureReport run_capture(BlockSource& source, CaptureSink& sink, std::chrono::milliseconds duration,
                          const CaptureOptions& options = {});

CaptureReport run_capture(BlockSource& source, const std::filesystem::path& out, std::chrono::milliseconds duration,
                          const CaptureOptions& options = {});

struct FrameInfo {
  std::uint64_t sequence_index = 0;
  std::uint64_t start_time_ns = 0;
  std::uint32_t length = 0;
  bool checksum_ok = false;
  std::vector<std::uint8_t> payload;
};

/// Parses a capture file frame by frame. Throws Errc::Capture on a bad magic
/// or a truncated frame (torn write).
std::vector<FrameInfo> read_capture(const std::filesystem::path& path);

std::uint32_t crc32(std::span<const std::uint8_t> data);

}  // namespace cvqos::recorder
