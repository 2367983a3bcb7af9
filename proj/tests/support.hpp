#pragma once

// Shared fixtures and independent oracles for the test suites. The oracles
// here deliberately re-implement production rules through different code
// paths (std::regex, manual splicing) so the suites compare two routes.

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <random>
#include <regex>
#include <string>
#include <vector>

#include "decoyvault/fpe.hpp"
#include "decoyvault/identity.hpp"
#include "decoyvault/scanner.hpp"
#include "decoyvault/util.hpp"

namespace testsupport {

class TempDir {
 public:
  TempDir() {
    path_ = std::filesystem::temp_directory_path() /
            ("decoyvault_test_" + decoyvault::random_hex(8));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline decoyvault::HostIdentity owner_identity() {
  decoyvault::HostIdentity id;
  id.mac = "aa:bb:cc:dd:ee:ff";
  id.ip = "192.168.1.2";
  id.hostname = "host1";
  id.user_id = "alice";
  return id.with_computed_hash();
}

inline decoyvault::HostIdentity grantee_identity() {
  decoyvault::HostIdentity id;
  id.mac = "02:03:04:05:06:07";
  id.ip = "10.1.2.3";
  id.hostname = "guesthost";
  id.user_id = "bob";
  return id.with_computed_hash();
}

/// Per-field values guaranteed to differ from owner_identity().
inline std::string wrong_value(decoyvault::Identifier id) {
  switch (id) {
    case decoyvault::Identifier::mac: return "00:11:22:33:44:55";
    case decoyvault::Identifier::ip: return "10.99.98.97";
    case decoyvault::Identifier::hostname: return "wronghost";
    case decoyvault::Identifier::user_id: return "mallory";
    case decoyvault::Identifier::quad_hash: return std::string(64, '0');
  }
  return {};
}

/// Identity whose field f is correct iff bit f of `correct_mask` is set.
inline decoyvault::HostIdentity identity_for_mask(
    const decoyvault::HostIdentity& genuine, unsigned correct_mask) {
  decoyvault::HostIdentity presented;
  for (decoyvault::Identifier id : decoyvault::kAllIdentifiers) {
    bool correct = (correct_mask >> static_cast<unsigned>(id)) & 1u;
    presented.field(id) = correct ? genuine.field(id) : wrong_value(id);
  }
  return presented;
}

inline decoyvault::fpe::FpeKey fixed_key() {
  std::string hex;
  for (int i = 0; i < 32; ++i) {
    char buf[3];
    std::snprintf(buf, sizeof(buf), "%02x", i);
    hex += buf;
  }
  return decoyvault::fpe::FpeKey::from_hex(hex);
}

/// Regex re-implementation of the sensitive-span rule, used as the second
/// route the scanner is checked against.
inline std::vector<decoyvault::scanner::DigitRun> scan_oracle(
    std::string_view content) {
  static const std::regex token_re(R"([^ \t\r\n]+)");
  static const std::regex sensitive_re(
      R"([-/.:,()#+]*[0-9][0-9\-/.:,()#+]*)");
  static const std::regex run_re("[0-9]+");

  std::vector<decoyvault::scanner::DigitRun> runs;
  const char* base = content.data();
  auto tokens_end = std::cregex_iterator();
  for (std::cregex_iterator it(base, base + content.size(), token_re);
       it != tokens_end; ++it) {
    const std::string token = it->str();
    if (!std::regex_match(token.begin(), token.end(), sensitive_re)) continue;
    std::size_t token_offset = static_cast<std::size_t>(it->position(0));
    auto runs_end = std::sregex_iterator();
    for (std::sregex_iterator rit(token.begin(), token.end(), run_re);
         rit != runs_end; ++rit) {
      runs.push_back(decoyvault::scanner::DigitRun{
          token_offset + static_cast<std::size_t>(rit->position(0)),
          static_cast<std::size_t>(rit->length(0)), rit->str()});
    }
  }
  return runs;
}

/// Independent decoy construction: scan_oracle spans spliced with digit
/// cipher output, 64-digit segments, run_index advancing per segment.
inline std::string splice_oracle(std::string_view original,
                                 const decoyvault::fpe::FpeKey& key,
                                 std::string_view object_id,
                                 std::uint64_t decoy_index) {
  std::string out(original);
  std::uint64_t segment = 0;
  for (const auto& run : scan_oracle(original)) {
    std::size_t off = 0;
    while (off < run.digits.size()) {
      std::size_t n = std::min<std::size_t>(64, run.digits.size() - off);
      decoyvault::fpe::Tweak tweak{std::string(object_id), decoy_index, segment++};
      out.replace(run.start + off, n,
                  decoyvault::fpe::encrypt_digits(
                      key, tweak, std::string_view(run.digits).substr(off, n)));
      off += n;
    }
  }
  return out;
}

/// 20 deterministic files mixing SSN-like, card-like, date-like, phone-like
/// and alphanumeric tokens, plus edge cases (empty, binary, huge run).
inline std::vector<std::string> make_corpus() {
  std::mt19937 rng(20240817);
  auto pick = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  auto fmt = [](const char* pattern, auto... args) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), pattern, args...);
    return std::string(buf);
  };

  const std::vector<std::string> words = {
      "invoice", "ledger",  "account", "shipment", "order",   "ref",
      "customer", "total",  "hello",   "A1B2",     "code42",  "XJ-9",
      "alpha",    "beta",   "gamma",   "delta",    "omega",   "sigma"};

  std::vector<std::string> corpus;
  for (int f = 0; f < 16; ++f) {
    std::string content;
    int tokens = pick(30, 70);
    for (int t = 0; t < tokens; ++t) {
      switch (pick(0, 7)) {
        case 0:
          content += fmt("%03d-%02d-%04d", pick(0, 999), pick(0, 99), pick(0, 9999));
          break;
        case 1:
          content += fmt("%04d-%04d-%04d-%04d", pick(0, 9999), pick(0, 9999),
                         pick(0, 9999), pick(0, 9999));
          break;
        case 2:
          content += fmt("%02d/%02d/%04d", pick(1, 12), pick(1, 28), pick(1970, 2030));
          break;
        case 3:
          content += fmt("(%03d)%03d-%04d", pick(200, 999), pick(100, 999),
                         pick(0, 9999));
          break;
        case 4:
          content += fmt("%d.%02d", pick(0, 100000), pick(0, 99));
          break;
        default:
          content += words[static_cast<std::size_t>(pick(0, 17))];
          break;
      }
      content += (pick(0, 9) == 0) ? "\n" : " ";
    }
    corpus.push_back(std::move(content));
  }

  corpus.emplace_back();                                     // empty
  corpus.push_back("plain words only nothing numeric here\n");
  corpus.push_back(std::string("\x00bin 777-88\x00\x00 42\n", 17));  // binary
  corpus.push_back("huge " + std::string(150, '7') + " run\n");      // > 64 digits
  return corpus;
}

struct CommandResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

/// Runs argv[0] with the given arguments, capturing stdout/stderr.
inline CommandResult run_cmd(const std::vector<std::string>& argv) {
  int out_pipe[2];
  int err_pipe[2];
  if (pipe(out_pipe) != 0 || pipe(err_pipe) != 0) {
    return {};
  }
  pid_t pid = fork();
  if (pid == 0) {
    dup2(out_pipe[1], STDOUT_FILENO);
    dup2(err_pipe[1], STDERR_FILENO);
    close(out_pipe[0]);
    close(out_pipe[1]);
    close(err_pipe[0]);
    close(err_pipe[1]);
    std::vector<char*> cargv;
    cargv.reserve(argv.size() + 1);
    for (const std::string& arg : argv) cargv.push_back(const_cast<char*>(arg.c_str()));
    cargv.push_back(nullptr);
    execv(cargv[0], cargv.data());
    _exit(127);
  }
  close(out_pipe[1]);
  close(err_pipe[1]);

  CommandResult result;
  auto drain = [](int fd, std::string& sink) {
    char buf[4096];
    ssize_t n;
    while ((n = read(fd, buf, sizeof(buf))) > 0) {
      sink.append(buf, static_cast<std::size_t>(n));
    }
    close(fd);
  };
  drain(out_pipe[0], result.out);
  drain(err_pipe[0], result.err);

  int status = 0;
  waitpid(pid, &status, 0);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

}  // namespace testsupport
