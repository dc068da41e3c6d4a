#pragma once

#include <chrono>
#include <cstdint>
#include <future>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "airboard/board.hpp"
#include "airboard/image.hpp"

namespace airboard {

struct OcrResult {
  std::string text;
  std::optional<double> confidence;  // in [0, 1] when known
  double elapsed_ms = 0.0;
};

// The OCR engine could not be reached or exited abnormally.
class OcrUnavailable : public Error {
 public:
  using Error::Error;
};

class OcrTimeout : public Error {
 public:
  using Error::Error;
};

class OcrBackend {
 public:
  virtual ~OcrBackend() = default;
  // Must not retain or modify `img`.
  virtual OcrResult recognize(const RgbImage& img) = 0;
  virtual std::string name() const = 0;
};

class MockOcr final : public OcrBackend {
 public:
  explicit MockOcr(std::string text) : text_(std::move(text)) {}
  OcrResult recognize(const RgbImage& img) override;
  std::string name() const override { return "mock"; }

 private:
  std::string text_;
};

inline constexpr const char* kDefaultOcrCommand = "tesseract <image> stdout";
inline constexpr const char* kOcrCommandEnv = "AIRBOARD_OCR_CMD";
inline constexpr std::chrono::milliseconds kDefaultOcrTimeout{10'000};

// Runs an OCR engine as a subprocess. The image is written as a PPM file to
// a temporary path that replaces the `<image>` placeholder in the command
// template (or is appended when the placeholder is missing); recognized text
// is read from the child's standard output with surrounding whitespace
// trimmed.
class ExternalOcr final : public OcrBackend {
 public:
  explicit ExternalOcr(std::string command_template = kDefaultOcrCommand,
                       std::chrono::milliseconds timeout = kDefaultOcrTimeout);

  // Template from AIRBOARD_OCR_CMD when set, otherwise `fallback`.
  static std::string resolve_command(const std::string& fallback = kDefaultOcrCommand);

  OcrResult recognize(const RgbImage& img) override;
  std::string name() const override { return "external"; }
  const std::string& command_template() const { return command_; }

 private:
  std::string command_;
  std::chrono::milliseconds timeout_;
};

// Routes Detect requests to a backend with at most one request in flight.
//
// In synchronous mode the backend runs inline and the outcome is returned
// straight from submit(), which keeps replays deterministic. In asynchronous
// mode the backend runs on a worker thread and outcomes surface from poll();
// a submit while a request is pending yields a Busy event.
class OcrDispatcher {
 public:
  OcrDispatcher(std::shared_ptr<OcrBackend> backend, bool asynchronous);
  ~OcrDispatcher();

  OcrDispatcher(const OcrDispatcher&) = delete;
  OcrDispatcher& operator=(const OcrDispatcher&) = delete;

  std::vector<BoardEvent> submit(std::shared_ptr<const RgbImage> image, std::int64_t frame_index);
  std::vector<BoardEvent> poll(std::int64_t frame_index);
  // Blocks until any pending request completes.
  std::vector<BoardEvent> drain(std::int64_t frame_index);

  bool busy() const { return pending_.valid(); }
  bool asynchronous() const { return asynchronous_; }

 private:
  static BoardEvent run(const std::shared_ptr<OcrBackend>& backend, const RgbImage& image,
                        std::int64_t frame_index);

  std::shared_ptr<OcrBackend> backend_;
  bool asynchronous_;
  std::future<BoardEvent> pending_;
};

}  // namespace airboard
