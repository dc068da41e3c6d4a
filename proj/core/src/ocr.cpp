#include "airboard/ocr.hpp"

#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstdlib>
#include <filesystem>

#include "airboard/ppm.hpp"

namespace airboard {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string trim(const std::string& s) {
  const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && is_space(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::filesystem::path temp_image_path() {
  static std::atomic<unsigned> counter{0};
  return std::filesystem::temp_directory_path() /
         ("airboard-ocr-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + ".ppm");
}

// Removes the file when it goes out of scope.
struct TempFile {
  std::filesystem::path path;
  ~TempFile() {
    std::error_code ec;
    std::filesystem::remove(path, ec);
  }
};

struct ProcessOutput {
  std::string out;
  int status = 0;
};

ProcessOutput run_shell(const std::string& command, std::chrono::milliseconds timeout) {
  int fds[2];
  if (::pipe(fds) != 0) throw OcrUnavailable("ocr: pipe() failed");

  const pid_t pid = ::fork();
  if (pid < 0) {
    ::close(fds[0]);
    ::close(fds[1]);
    throw OcrUnavailable("ocr: fork() failed");
  }
  if (pid == 0) {
    ::setpgid(0, 0);
    ::dup2(fds[1], STDOUT_FILENO);
    ::close(fds[0]);
    ::close(fds[1]);
    if (FILE* devnull = std::freopen("/dev/null", "w", stderr); devnull == nullptr) _exit(126);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  // Also set from the parent so a kill cannot race the child's setpgid.
  ::setpgid(pid, pid);
  ::close(fds[1]);

  ProcessOutput result;
  const auto deadline = Clock::now() + timeout;
  char buf[4096];
  bool timed_out = false;
  for (;;) {
    const auto left =
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
    if (left <= 0) {
      timed_out = true;
      break;
    }
    pollfd pfd{fds[0], POLLIN, 0};
    const int rc = ::poll(&pfd, 1, static_cast<int>(left));
    if (rc < 0 && errno == EINTR) continue;
    if (rc == 0) {
      timed_out = true;
      break;
    }
    const ssize_t n = ::read(fds[0], buf, sizeof buf);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    result.out.append(buf, static_cast<std::size_t>(n));
  }
  ::close(fds[0]);
  if (timed_out) ::kill(-pid, SIGKILL);

  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (timed_out) throw OcrTimeout("ocr: engine timed out after " + std::to_string(timeout.count()) + " ms");
  result.status = status;
  return result;
}

}  // namespace

OcrResult MockOcr::recognize(const RgbImage& img) {
  if (img.empty()) throw StateError("ocr: empty image");
  return {text_, 1.0, 0.0};
}

ExternalOcr::ExternalOcr(std::string command_template, std::chrono::milliseconds timeout)
    : command_(std::move(command_template)), timeout_(timeout) {
  if (command_.empty()) throw ConfigError("ocr: empty command template");
  if (timeout_.count() <= 0) throw ConfigError("ocr: timeout must be positive");
}

std::string ExternalOcr::resolve_command(const std::string& fallback) {
  if (const char* env = std::getenv(kOcrCommandEnv); env != nullptr && *env != '\0') return env;
  return fallback;
}

OcrResult ExternalOcr::recognize(const RgbImage& img) {
  if (img.empty()) throw StateError("ocr: empty image");
  const auto start = Clock::now();
  TempFile file{temp_image_path()};
  write_ppm(file.path, img);

  const std::string quoted = "'" + file.path.string() + "'";
  std::string command = command_;
  if (const auto at = command.find("<image>"); at != std::string::npos) {
    command.replace(at, 7, quoted);
  } else {
    command += " " + quoted;
  }

  const auto out = run_shell(command, timeout_);
  if (!WIFEXITED(out.status) || WEXITSTATUS(out.status) != 0) {
    const int code = WIFEXITED(out.status) ? WEXITSTATUS(out.status) : -1;
    throw OcrUnavailable("ocr: engine exited with status " + std::to_string(code));
  }
  return {trim(out.out), std::nullopt, ms_since(start)};
}

OcrDispatcher::OcrDispatcher(std::shared_ptr<OcrBackend> backend, bool asynchronous)
    : backend_(std::move(backend)), asynchronous_(asynchronous) {}

OcrDispatcher::~OcrDispatcher() {
  if (pending_.valid()) pending_.wait();
}

BoardEvent OcrDispatcher::run(const std::shared_ptr<OcrBackend>& backend, const RgbImage& image,
                              std::int64_t frame_index) {
  if (!backend) {
    return {.kind = EventKind::DetectFailed, .frame_index = frame_index, .text = "no_backend"};
  }
  try {
    const auto r = backend->recognize(image);
    return {.kind = EventKind::DetectResult,
            .frame_index = frame_index,
            .text = r.text,
            .confidence = r.confidence,
            .elapsed_ms = r.elapsed_ms};
  } catch (const OcrTimeout&) {
    return {.kind = EventKind::DetectFailed, .frame_index = frame_index, .text = "timeout"};
  } catch (const std::exception& e) {
    return {.kind = EventKind::DetectFailed, .frame_index = frame_index, .text = e.what()};
  }
}

std::vector<BoardEvent> OcrDispatcher::submit(std::shared_ptr<const RgbImage> image,
                                              std::int64_t frame_index) {
  if (!image) throw StateError("ocr: no image to recognize");
  if (!asynchronous_) return {run(backend_, *image, frame_index)};

  if (pending_.valid()) {
    if (pending_.wait_for(std::chrono::seconds(0)) != std::future_status::ready) {
      return {{.kind = EventKind::Busy, .frame_index = frame_index, .text = "detect_in_flight"}};
    }
  }
  std::vector<BoardEvent> done = poll(frame_index);
  pending_ = std::async(std::launch::async, [backend = backend_, image, frame_index] {
    return run(backend, *image, frame_index);
  });
  return done;
}

std::vector<BoardEvent> OcrDispatcher::poll(std::int64_t frame_index) {
  if (!pending_.valid() ||
      pending_.wait_for(std::chrono::seconds(0)) != std::future_status::ready) {
    return {};
  }
  BoardEvent e = pending_.get();
  e.frame_index = frame_index;
  return {std::move(e)};
}

std::vector<BoardEvent> OcrDispatcher::drain(std::int64_t frame_index) {
  if (!pending_.valid()) return {};
  pending_.wait();
  return poll(frame_index);
}

}  // namespace airboard
