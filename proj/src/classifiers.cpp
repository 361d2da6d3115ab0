#include "ergolab/classifiers.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <sstream>
#include <thread>

#include "ergolab/errors.hpp"
#include "ergolab/metrics.hpp"

namespace ergolab {

std::string to_string(Verdict v) { return v == Verdict::Yes ? "YES" : "NO"; }

FreqMarkovTester::FreqMarkovTester(int max_order, double c) : max_order_(max_order), c_(c) {
  if (max_order < 1 || max_order + 2 > kDefaultBlockCap) throw RangeError("tester max_order out of range");
  if (!(c > 0.0)) throw RangeError("tester constant must be positive");
}

std::string FreqMarkovTester::name() const {
  std::ostringstream os;
  os << "freq:" << max_order_ << ":" << c_;
  return os.str();
}

nlohmann::json FreqMarkovTester::describe() const {
  return {{"name", "freq"}, {"max_order", max_order_}, {"c", c_}};
}

double FreqMarkovTester::threshold(std::size_t n) const {
  const double nn = static_cast<double>(n);
  return c_ * std::sqrt(std::log(nn) / nn);
}

double FreqMarkovTester::statistic(const Word& x, int k) {
  const int len = k + 2;
  const auto counts = block_counts(x, len);
  const double windows = static_cast<double>(x.size() - len + 1);
  const std::uint64_t contexts = std::uint64_t{1} << k;
  // index of a x b = (a << (k+1)) | (x << 1) | b
  double d = 0.0;
  for (std::uint64_t ctx = 0; ctx < contexts; ++ctx) {
    double pab[2][2];
    double px = 0.0, pxb[2] = {0.0, 0.0}, pax[2] = {0.0, 0.0};
    for (std::uint64_t a = 0; a < 2; ++a) {
      for (std::uint64_t b = 0; b < 2; ++b) {
        pab[a][b] = static_cast<double>(counts[(a << (k + 1)) | (ctx << 1) | b]) / windows;
        px += pab[a][b];
        pxb[b] += pab[a][b];
        pax[a] += pab[a][b];
      }
    }
    if (px == 0.0) continue;
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) d += std::abs(pab[a][b] - pax[a] * pxb[b] / px);
    }
  }
  return d;
}

FreqMarkovTester::Decision FreqMarkovTester::decide(const Word& x) const {
  Decision out;
  if (x.size() < 2) return out;
  out.threshold = threshold(x.size());
  for (int k = 0; k <= max_order_ && static_cast<std::size_t>(k + 2) <= x.size(); ++k) {
    const double s = statistic(x, k);
    out.statistics.push_back(s);
    if (s <= out.threshold) {
      out.order = k;
      return out;
    }
  }
  if (static_cast<std::size_t>(max_order_ + 2) > x.size()) return out;
  out.verdict = Verdict::No;
  out.order = -1;
  return out;
}

// ---------------------------------------------------------------------------

struct ExternalClassifier::Worker {
  pid_t pid = -1;
  int to_child = -1;
  int from_child = -1;
  std::string buffer;

  ~Worker() {
    if (to_child >= 0) ::close(to_child);
    if (from_child >= 0) ::close(from_child);
    if (pid > 0) {
      int status = 0;
      for (int i = 0; i < 100; ++i) {
        if (::waitpid(pid, &status, WNOHANG) == pid) return;
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
      }
      ::kill(-pid, SIGKILL);
      ::waitpid(pid, &status, 0);
    }
  }

  [[noreturn]] void fail(const std::string& what) {
    if (pid > 0) {
      int status = 0;
      std::string detail;
      if (::waitpid(pid, &status, WNOHANG) == pid) {
        pid = -1;
        if (WIFEXITED(status)) detail = " (exit status " + std::to_string(WEXITSTATUS(status)) + ")";
        if (WIFSIGNALED(status)) detail = " (killed by signal " + std::to_string(WTERMSIG(status)) + ")";
      } else {
        ::kill(-pid, SIGKILL);
        ::waitpid(pid, &status, 0);
        pid = -1;
      }
      throw ClassifierError(what + detail);
    }
    throw ClassifierError(what);
  }

  void send(const std::string& line) {
    std::size_t off = 0;
    while (off < line.size()) {
      const ssize_t n = ::write(to_child, line.data() + off, line.size() - off);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) fail("external classifier closed its input");
      off += static_cast<std::size_t>(n);
    }
  }

  std::string receive(std::chrono::milliseconds timeout) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    while (true) {
      if (auto nl = buffer.find('\n'); nl != std::string::npos) {
        std::string line = buffer.substr(0, nl);
        buffer.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
      if (left.count() <= 0) fail("external classifier timed out after " + std::to_string(timeout.count()) + " ms");
      pollfd p{from_child, POLLIN, 0};
      const int r = ::poll(&p, 1, static_cast<int>(left.count()));
      if (r < 0 && errno == EINTR) continue;
      if (r == 0) continue;
      char chunk[4096];
      const ssize_t n = ::read(from_child, chunk, sizeof chunk);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) fail("external classifier closed its output");
      buffer.append(chunk, static_cast<std::size_t>(n));
    }
  }
};

ExternalClassifier::ExternalClassifier(std::vector<std::string> argv, std::chrono::milliseconds timeout,
                                       std::size_t pool_size)
    : argv_(std::move(argv)), timeout_(timeout), pool_size_(std::max<std::size_t>(pool_size, 1)) {
  if (argv_.empty()) throw ConfigError("external classifier needs a command");
  ::signal(SIGPIPE, SIG_IGN);
  release(spawn());
}

ExternalClassifier::~ExternalClassifier() = default;

std::unique_ptr<ExternalClassifier::Worker> ExternalClassifier::spawn() {
  int in[2], out[2];
  if (::pipe2(in, O_CLOEXEC) != 0) throw ClassifierError(std::string("pipe: ") + std::strerror(errno));
  if (::pipe2(out, O_CLOEXEC) != 0) {
    ::close(in[0]);
    ::close(in[1]);
    throw ClassifierError(std::string("pipe: ") + std::strerror(errno));
  }
  std::vector<char*> args;
  for (auto& a : argv_) args.push_back(a.data());
  args.push_back(nullptr);
  const pid_t pid = ::fork();
  if (pid < 0) throw ClassifierError(std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    ::setpgid(0, 0);
    ::dup2(in[0], STDIN_FILENO);
    ::dup2(out[1], STDOUT_FILENO);
    ::execvp(args[0], args.data());
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  ::close(in[0]);
  ::close(out[1]);
  auto w = std::make_unique<Worker>();
  w->pid = pid;
  w->to_child = in[1];
  w->from_child = out[0];
  w->send("HELLO ergolab-classifier-1\n");
  const std::string reply = w->receive(timeout_);
  if (reply.rfind("OK ", 0) != 0) w->fail("external classifier handshake failed: '" + reply + "'");
  {
    std::lock_guard lock(mutex_);
    remote_name_ = reply.substr(3);
    ++live_;
  }
  return w;
}

std::unique_ptr<ExternalClassifier::Worker> ExternalClassifier::acquire() {
  std::unique_lock lock(mutex_);
  while (true) {
    if (!idle_.empty()) {
      auto w = std::move(idle_.back());
      idle_.pop_back();
      return w;
    }
    if (live_ < pool_size_) {
      lock.unlock();
      return spawn();
    }
    available_.wait(lock);
  }
}

void ExternalClassifier::release(std::unique_ptr<Worker> w) {
  std::lock_guard lock(mutex_);
  idle_.push_back(std::move(w));
  available_.notify_one();
}

Verdict ExternalClassifier::classify(const Word& x) {
  auto w = acquire();
  try {
    w->send("CLASSIFY " + x.to_string() + "\n");
    const std::string reply = w->receive(timeout_);
    Verdict v;
    if (reply == "YES") {
      v = Verdict::Yes;
    } else if (reply == "NO") {
      v = Verdict::No;
    } else {
      w->fail("external classifier protocol violation: '" + reply.substr(0, 64) + "'");
    }
    release(std::move(w));
    return v;
  } catch (...) {
    w.reset();
    {
      std::lock_guard lock(mutex_);
      --live_;
    }
    available_.notify_one();
    throw;
  }
}

nlohmann::json ExternalClassifier::describe() const {
  return {{"name", "external"}, {"command", argv_}, {"remote_name", remote_name_}, {"timeout_ms", timeout_.count()}};
}

ClassifierHandle make_classifier(const std::string& spec, std::chrono::milliseconds timeout, std::size_t pool_size) {
  if (spec == "yes") return std::make_shared<ConstantClassifier>(Verdict::Yes);
  if (spec == "no") return std::make_shared<ConstantClassifier>(Verdict::No);
  if (spec.rfind("freq:", 0) == 0) {
    const std::string rest = spec.substr(5);
    const auto colon = rest.find(':');
    try {
      const int k = std::stoi(rest.substr(0, colon));
      const double c = colon == std::string::npos ? 3.0 : std::stod(rest.substr(colon + 1));
      return std::make_shared<FreqMarkovTester>(k, c);
    } catch (const std::logic_error&) {
      throw ConfigError("bad classifier spec '" + spec + "'");
    }
  }
  if (spec.rfind("ext:", 0) == 0 || spec.rfind("exec:", 0) == 0) {
    std::istringstream is(spec.substr(spec.find(':') + 1));
    std::vector<std::string> argv;
    for (std::string a; is >> a;) argv.push_back(a);
    return std::make_shared<ExternalClassifier>(std::move(argv), timeout, pool_size);
  }
  throw ConfigError("unknown classifier spec '" + spec + "' (expected yes, no, freq:K[:C] or ext:COMMAND)");
}

}  // namespace ergolab
