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

#include "cvqos/recorder.hpp"

#include <fcntl.h>
#include <unistd.h>
#include <zlib.h>

#include <algorithm>
#include <array>
#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <fstream>
#include <mutex>
#include <optional>
#include <thread>

#include "cvqos/csv.hpp"
#include "cvqos/error.hpp"
#include "cvqos/rng.hpp"

namespace cvqos::recorder {

namespace {

using Clock = std::chrono::steady_clock;

template <typename T>
void put_le(std::uint8_t* out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

template <typename T>
T get_le(const std::uint8_t* in) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(in[i]) << (8 * i);
  return v;
}

void encode_frame(const Block& b, std::vector<std::uint8_t>& frame) {
  frame.resize(kFrameHeaderSize + b.samples.size());
  put_le<std::uint32_t>(frame.data(), kFrameMagic);
  put_le<std::uint64_t>(frame.data() + 4, b.sequence_index);
  put_le<std::uint64_t>(frame.data() + 12, b.start_time_ns);
  put_le<std::uint32_t>(frame.data() + 20, static_cast<std::uint32_t>(b.samples.size()));
  put_le<std::uint32_t>(frame.data() + 24, crc32(b.samples));
  std::copy(b.samples.begin(), b.samples.end(), frame.begin() + kFrameHeaderSize);
}

enum class BufferState { Filling, Pending, Draining, Free };

struct Buffer {
  std::vector<Block> blocks;
  std::size_t filled = 0;
  BufferState state = BufferState::Free;
};

/// Serialization controller plus its worker pool. The controller hands every
/// worker a strided share of one buffer; frame offsets are fixed up front so
/// parallel writes never overlap and the file stays in sequence order.
class Serializer {
 public:
  Serializer(CaptureSink& sink, std::array<Buffer, 2>& buffers, std::mutex& mu, std::condition_variable& cv,
             const CaptureOptions& options, std::size_t frame_size)
      : sink_(sink), buffers_(buffers), mu_(mu), cv_(cv), options_(options), frame_size_(frame_size) {
    for (std::size_t w = 0; w < options.serializers; ++w) {
      workers_.emplace_back([this, w] { worker_loop(w); });
    }
    controller_ = std::thread([this] { controller_loop(); });
  }

  ~Serializer() { shutdown(); }

  void shutdown() {
    {
      std::lock_guard lock(mu_);
      stopping_ = true;
    }
    cv_.notify_all();
    if (controller_.joinable()) controller_.join();
    {
      std::lock_guard lock(job_mu_);
      job_stop_ = true;
    }
    job_cv_.notify_all();
    for (auto& t : workers_) {
      if (t.joinable()) t.join();
    }
  }

  // Guarded by the shared mutex.
  std::uint64_t captured = 0;
  std::uint64_t bytes_written = 0;
  bool failed = false;
  std::string failure;

 private:
  void controller_loop() {
    std::unique_lock lock(mu_);
    while (true) {
      cv_.wait(lock, [&] { return stopping_ || pending_index().has_value(); });
      auto idx = pending_index();
      if (!idx) {
        if (stopping_) return;
        continue;
      }
      Buffer& buf = buffers_[*idx];
      buf.state = BufferState::Draining;
      const auto base = bytes_written;
      const auto count = buf.filled;
      lock.unlock();

      const auto error = drain(buf, count, base);

      lock.lock();
      if (error) {
        if (!failed) {
          failed = true;
          failure = *error;
          sink_.mark_partial(failure);
        }
      } else {
        captured += count;
        bytes_written += count * frame_size_;
      }
      buf.filled = 0;
      buf.state = BufferState::Free;
      cv_.notify_all();
    }
  }

  std::optional<std::size_t> pending_index() const {
    for (std::size_t i = 0; i < buffers_.size(); ++i) {
      if (buffers_[i].state == BufferState::Pending) return i;
    }
    return std::nullopt;
  }

  std::optional<std::string> drain(Buffer& buf, std::size_t count, std::uint64_t base) {
    std::unique_lock lock(job_mu_);
    job_buffer_ = &buf;
    job_count_ = count;
    job_base_ = base;
    job_done_ = 0;
    job_error_.reset();
    ++job_generation_;
    job_cv_.notify_all();
    job_cv_.wait(lock, [&] { return job_done_ == workers_.size(); });
    return job_error_;
  }

  void worker_loop(std::size_t w) {
    std::vector<std::uint8_t> frame;
    std::uint64_t seen_generation = 0;
    while (true) {
      Buffer* buf;
      std::size_t count;
      std::uint64_t base;
      {
        std::unique_lock lock(job_mu_);
        job_cv_.wait(lock, [&] { return job_stop_ || job_generation_ != seen_generation; });
        if (job_stop_) return;
        seen_generation = job_generation_;
        buf = job_buffer_;
        count = job_count_;
        base = job_base_;
      }
      std::optional<std::string> error;
      for (std::size_t j = w; j < count && !error; j += workers_.size()) {
        if (options_.sink_delay_per_block.count() > 0) std::this_thread::sleep_for(options_.sink_delay_per_block);
        encode_frame(buf->blocks[j], frame);
        try {
          sink_.write_at(base + j * frame_size_, frame);
        } catch (const std::exception& e) {
          error = e.what();
        }
      }
      {
        std::lock_guard lock(job_mu_);
        if (error && !job_error_) job_error_ = error;
        ++job_done_;
      }
      job_cv_.notify_all();
    }
  }

  CaptureSink& sink_;
  std::array<Buffer, 2>& buffers_;
  std::mutex& mu_;
  std::condition_variable& cv_;
  const CaptureOptions& options_;
  std::size_t frame_size_;
  bool stopping_ = false;

  std::mutex job_mu_;
  std::condition_variable job_cv_;
  Buffer* job_buffer_ = nullptr;
  std::size_t job_count_ = 0;
  std::uint64_t job_base_ = 0;
  std::size_t job_done_ = 0;
  std::uint64_t job_generation_ = 0;
  std::optional<std::string> job_error_;
  bool job_stop_ = false;

  std::vector<std::thread> workers_;
  std::thread controller_;
};

}  // namespace

std::uint32_t crc32(std::span<const std::uint8_t> data) {
  return static_cast<std::uint32_t>(::crc32(::crc32(0L, Z_NULL, 0), data.data(), static_cast<uInt>(data.size())));
}

void SyntheticSource::payload_for(std::uint64_t seed, std::uint64_t index, std::span<std::uint8_t> out) {
  std::uint64_t state = mix64(seed ^ mix64(index));
  for (std::size_t i = 0; i < out.size(); i += 8) {
    state = mix64(state);
    const auto n = std::min<std::size_t>(8, out.size() - i);
    for (std::size_t b = 0; b < n; ++b) out[i + b] = static_cast<std::uint8_t>(state >> (8 * b));
  }
}

void SyntheticSource::produce(std::uint64_t index, std::uint64_t start_time_ns, Block& out) {
  out.sequence_index = index;
  out.start_time_ns = start_time_ns;
  out.duration_ms = kBlockDurationMs;
  out.tag = 18150;  // band 3, earfcn 1300, in 100 kHz units
  out.samples.resize(block_bytes_);
  payload_for(seed_, index, out.samples);
}

FileSink::FileSink(const std::filesystem::path& path) : path_(path) {
  fd_ = ::open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd_ < 0) throw Error(Errc::Io, "cannot open " + path.string() + ": " + std::strerror(errno));
  std::error_code ec;
  auto marker = path;
  marker += ".partial";
  std::filesystem::remove(marker, ec);
}

FileSink::~FileSink() {
  if (fd_ >= 0) ::close(fd_);
}

void FileSink::write_at(std::uint64_t offset, std::span<const std::uint8_t> frame) {
  std::size_t done = 0;
  while (done < frame.size()) {
    const auto n = ::pwrite(fd_, frame.data() + done, frame.size() - done, static_cast<off_t>(offset + done));
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(Errc::Io, "pwrite " + path_.string() + ": " + std::strerror(errno));
    }
    done += static_cast<std::size_t>(n);
  }
}

void FileSink::mark_partial(const std::string& reason) {
  auto marker = path_;
  marker += ".partial";
  std::ofstream(marker) << reason << "\n";
}

void FileSink::finish(std::uint64_t total_bytes) {
  if (::ftruncate(fd_, static_cast<off_t>(total_bytes)) != 0) {
    throw Error(Errc::Io, "ftruncate " + path_.string() + ": " + std::strerror(errno));
  }
}

CaptureReport run_capture(BlockSource& source, CaptureSink& sink, std::chrono::milliseconds duration,
                          const CaptureOptions& options) {
  if (options.serializers == 0) throw Error(Errc::Config, "at least one serializer is required");
  if (options.blocks_per_buffer == 0) throw Error(Errc::Config, "blocks_per_buffer must be positive");

  CaptureReport report;
  const auto total_blocks = static_cast<std::uint64_t>(duration.count()) / kBlockDurationMs;
  if (total_blocks == 0) {
    sink.finish(0);
    return report;
  }

  const auto frame_size = kFrameHeaderSize + source.block_bytes();
  std::array<Buffer, 2> buffers;
  for (auto& b : buffers) {
    b.blocks.resize(options.blocks_per_buffer);
    for (auto& blk : b.blocks) blk.samples.resize(source.block_bytes());
  }
  std::mutex mu;
  std::condition_variable cv;
  Serializer serializer(sink, buffers, mu, cv, options, frame_size);

  std::size_t active = 0;
  buffers[active].state = BufferState::Filling;
  const auto block_period = std::chrono::milliseconds(kBlockDurationMs);
  const auto t0 = Clock::now();
  std::uint64_t lost = 0;

  auto hand_off = [&](std::unique_lock<std::mutex>& lock) {
    buffers[active].state = BufferState::Pending;
    cv.notify_all();
    const auto last_tag = buffers[active].blocks[buffers[active].filled - 1].tag;
    active = 1 - active;
    buffers[active].state = BufferState::Filling;
    buffers[active].filled = 0;
    ++report.buffer_swaps;
    lock.unlock();
    source.reconfigure(last_tag);
    lock.lock();
  };

  for (std::uint64_t k = 0; k < total_blocks; ++k) {
    const auto due = t0 + block_period * static_cast<std::int64_t>(k);
    std::this_thread::sleep_until(due);
    {
      std::lock_guard lock(mu);
      if (serializer.failed) break;
    }
    const auto start_ns = static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now().time_since_epoch()).count());
    Buffer& buf = buffers[active];
    source.produce(k, start_ns, buf.blocks[buf.filled]);
    ++buf.filled;
    ++report.blocks_produced;

    if (buf.filled < options.blocks_per_buffer) continue;

    // Swap. The producer may wait for the inactive buffer only until the next
    // block is due; past that the full buffer is dropped and counted.
    std::unique_lock lock(mu);
    const auto wait_start = Clock::now();
    const auto deadline = due + block_period;
    const bool free = cv.wait_until(lock, deadline, [&] { return buffers[1 - active].state == BufferState::Free; });
    report.max_swap_wait = std::max(report.max_swap_wait,
                                    std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - wait_start));
    if (free) {
      hand_off(lock);
    } else {
      lost += buf.filled;
      buf.filled = 0;
    }
  }

  // Flush a trailing partial buffer; no real-time deadline applies any more.
  {
    std::unique_lock lock(mu);
    if (buffers[active].filled > 0 && !serializer.failed) {
      cv.wait(lock, [&] { return buffers[1 - active].state == BufferState::Free; });
      hand_off(lock);
    }
    cv.wait(lock, [&] {
      return buffers[0].state != BufferState::Pending && buffers[0].state != BufferState::Draining &&
             buffers[1].state != BufferState::Pending && buffers[1].state != BufferState::Draining;
    });
  }
  serializer.shutdown();

  report.blocks_captured = serializer.captured;
  if (serializer.failed) {
    report.aborted = true;
    report.abort_reason = serializer.failure;
    report.blocks_lost = report.blocks_produced - report.blocks_captured;
  } else {
    report.blocks_lost = lost;
    sink.finish(serializer.bytes_written);
  }
  return report;
}

CaptureReport run_capture(BlockSource& source, const std::filesystem::path& out, std::chrono::milliseconds duration,
                          const CaptureOptions& options) {
  FileSink sink(out);
  return run_capture(source, sink, duration, options);
}

std::vector<FrameInfo> read_capture(const std::filesystem::path& path) {
  const auto data = io::read_all(path);
  const auto* bytes = reinterpret_cast<const std::uint8_t*>(data.data());
  std::vector<FrameInfo> frames;
  std::size_t pos = 0;
  while (pos < data.size()) {
    if (data.size() - pos < kFrameHeaderSize) throw Error(Errc::Capture, "truncated frame header at " + std::to_string(pos));
    if (get_le<std::uint32_t>(bytes + pos) != kFrameMagic) {
      throw Error(Errc::Capture, "bad frame magic at offset " + std::to_string(pos));
    }
    FrameInfo f;
    f.sequence_index = get_le<std::uint64_t>(bytes + pos + 4);
    f.start_time_ns = get_le<std::uint64_t>(bytes + pos + 12);
    f.length = get_le<std::uint32_t>(bytes + pos + 20);
    const auto crc = get_le<std::uint32_t>(bytes + pos + 24);
    pos += kFrameHeaderSize;
    if (data.size() - pos < f.length) throw Error(Errc::Capture, "truncated frame payload");
    f.payload.assign(bytes + pos, bytes + pos + f.length);
    f.checksum_ok = crc32(f.payload) == crc;
    pos += f.length;
    frames.push_back(std::move(f));
  }
  return frames;
}

}  // namespace cvqos::recorder
