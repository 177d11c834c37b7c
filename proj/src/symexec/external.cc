// Copyright 2026 The SymTEE Authors.
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


#include "symtee/symexec/external.h"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <regex>
#include <sstream>
#include <thread>

namespace symtee::symexec {

namespace fs = std::filesystem;

std::string_view StatusName(EngineOutcome::Status s) {
  switch (s) {
    case EngineOutcome::Status::kViolations: return "violations";
    case EngineOutcome::Status::kClean: return "clean";
    case EngineOutcome::Status::kEngineUnavailable: return "engine_unavailable";
    case EngineOutcome::Status::kEngineFailure: return "engine_failure";
  }
  return "?";
}

EngineConfig EngineConfig::FromEnvironment() {
  EngineConfig cfg;
  if (const char* v = std::getenv("SYMTEE_ENGINE_PATH")) cfg.engine_path = v;
  if (const char* v = std::getenv("SYMTEE_ENGINE_CC"); v && *v) cfg.cc_path = v;
  if (const char* v = std::getenv("SYMTEE_ENGINE_INCLUDE")) cfg.include_dir = v;
  if (const char* v = std::getenv("SYMTEE_ENGINE_TIMEOUT_SECS"); v && *v) {
    int secs = std::atoi(v);
    if (secs > 0) cfg.timeout_secs = secs;
  }
  if (const char* v = std::getenv("SYMTEE_ENGINE_ARGS")) {
    std::istringstream in(v);
    std::string arg;
    while (in >> arg) cfg.extra_args.push_back(arg);
  }
  return cfg;
}

namespace {

std::uint32_t ReadU32(std::string_view data, size_t* pos) {
  if (*pos + 4 > data.size()) throw MalformedOutput("ktest truncated");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v = (v << 8) | static_cast<unsigned char>(data[*pos + i]);
  }
  *pos += 4;
  return v;
}

std::string ReadBytes(std::string_view data, size_t* pos, std::uint32_t n) {
  if (n > data.size() - *pos) throw MalformedOutput("ktest truncated");
  std::string out(data.substr(*pos, n));
  *pos += n;
  return out;
}

void PutU32(std::string* out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) {
    out->push_back(static_cast<char>((v >> shift) & 0xff));
  }
}

bool Executable(const std::string& path) {
  if (path.empty()) return false;
  if (path.find('/') != std::string::npos) return ::access(path.c_str(), X_OK) == 0;
  const char* env = std::getenv("PATH");
  if (!env) return false;
  std::istringstream dirs(env);
  std::string dir;
  while (std::getline(dirs, dir, ':')) {
    if (!dir.empty() && ::access((dir + "/" + path).c_str(), X_OK) == 0) return true;
  }
  return false;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string Tail(const std::string& s, size_t n = 2000) {
  return s.size() <= n ? s : s.substr(s.size() - n);
}

struct ProcessResult {
  int exit_code = -1;
  bool timed_out = false;
  std::string output;
};

// Runs argv with stdout and stderr captured to `log_path`.
ProcessResult RunProcess(const std::vector<std::string>& argv, const fs::path& cwd,
                         const fs::path& log_path, int timeout_secs) {
  ProcessResult result;
  pid_t pid = ::fork();
  if (pid < 0) {
    result.output = "fork failed";
    return result;
  }
  if (pid == 0) {
    int fd = ::open(log_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    if (fd >= 0) {
      ::dup2(fd, 1);
      ::dup2(fd, 2);
      ::close(fd);
    }
    if (::chdir(cwd.c_str()) != 0) ::_exit(126);
    ::setpgid(0, 0);
    std::vector<char*> args;
    for (const std::string& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);
    ::execvp(args[0], args.data());
    ::_exit(127);
  }
  auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(timeout_secs);
  int status = 0;
  while (true) {
    pid_t r = ::waitpid(pid, &status, WNOHANG);
    if (r == pid) break;
    if (std::chrono::steady_clock::now() >= deadline) {
      ::kill(-pid, SIGKILL);
      ::kill(pid, SIGKILL);
      ::waitpid(pid, &status, 0);
      result.timed_out = true;
      break;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  if (!result.timed_out && WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
  result.output = Slurp(log_path);
  return result;
}

// "g_checked && \"Missing input validation\"" -> "Missing input validation"
std::string AssertMessage(const std::string& expr) {
  static const std::regex kQuoted("\"((?:[^\"\\\\]|\\\\.)*)\"");
  std::smatch m;
  if (std::regex_search(expr, m, kQuoted)) return m[1];
  return expr;
}

std::string Trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

Witness WitnessFrom(const std::vector<KTestObject>& objects) {
  Witness w;
  for (const KTestObject& o : objects) {
    if (o.bytes.empty() || o.bytes.size() > 8) continue;  // not a scalar
    std::uint64_t v = 0;
    for (size_t i = o.bytes.size(); i-- > 0;) {
      v = (v << 8) | static_cast<unsigned char>(o.bytes[i]);
    }
    w.assignment.emplace_back(o.name, v);
  }
  return w;
}

}  // namespace

std::vector<KTestObject> ParseKTest(std::string_view data) {
  size_t pos = 0;
  if (data.substr(0, 5) != "KTEST" && data.substr(0, 5) != "BOUT\n") {
    throw MalformedOutput("ktest has bad magic");
  }
  pos = 5;
  std::uint32_t version = ReadU32(data, &pos);
  if (version == 0 || version > 3) {
    throw MalformedOutput("unsupported ktest version " + std::to_string(version));
  }
  std::uint32_t nargs = ReadU32(data, &pos);
  for (std::uint32_t i = 0; i < nargs; ++i) ReadBytes(data, &pos, ReadU32(data, &pos));
  if (version >= 2) {
    ReadU32(data, &pos);
    ReadU32(data, &pos);
  }
  std::uint32_t nobjs = ReadU32(data, &pos);
  std::vector<KTestObject> out;
  for (std::uint32_t i = 0; i < nobjs; ++i) {
    KTestObject o;
    o.name = ReadBytes(data, &pos, ReadU32(data, &pos));
    o.bytes = ReadBytes(data, &pos, ReadU32(data, &pos));
    out.push_back(std::move(o));
  }
  if (pos != data.size()) throw MalformedOutput("trailing bytes after ktest objects");
  return out;
}

std::string WriteKTest(const std::vector<KTestObject>& objects) {
  std::string out = "KTEST";
  PutU32(&out, 3);
  PutU32(&out, 0);
  PutU32(&out, 0);
  PutU32(&out, 0);
  PutU32(&out, static_cast<std::uint32_t>(objects.size()));
  for (const KTestObject& o : objects) {
    PutU32(&out, static_cast<std::uint32_t>(o.name.size()));
    out += o.name;
    PutU32(&out, static_cast<std::uint32_t>(o.bytes.size()));
    out += o.bytes;
  }
  return out;
}

std::vector<Violation> ParseEngineOutput(const RawEngineOutput& raw) {
  std::vector<Violation> out;
  static const std::regex kErrName(R"(^(test\d+)\.assert\.err$)");
  for (const auto& [name, body] : raw.artifacts) {
    std::smatch m;
    if (!std::regex_match(name, m, kErrName)) continue;
    std::string test = m[1];
    std::istringstream lines(body);
    std::string line;
    std::optional<std::string> expr;
    int source_line = 0;
    while (std::getline(lines, line)) {
      if (line.rfind("Error: ASSERTION FAIL:", 0) == 0) {
        expr = Trim(line.substr(22));
      } else if (line.rfind("Line:", 0) == 0) {
        source_line = std::atoi(line.c_str() + 5);
      }
    }
    if (!expr) throw MalformedOutput(name + " has no assertion-failure line");
    auto kt = raw.artifacts.find(test + ".ktest");
    if (kt == raw.artifacts.end()) throw MalformedOutput(name + " has no matching .ktest");
    Violation v;
    v.engine = Engine::kExternal;
    v.message = AssertMessage(*expr);
    v.witness = WitnessFrom(ParseKTest(kt->second));
    v.source_line = source_line;
    v.artifact = test + ".ktest";
    out.push_back(std::move(v));
  }
  if (!out.empty()) return out;
  // Without artifacts fall back to the message stream.
  static const std::regex kLogLine(R"(KLEE: ERROR: ([^:]*):(\d+): ASSERTION FAIL: (.*))");
  std::istringstream lines(raw.log);
  std::string line;
  while (std::getline(lines, line)) {
    std::smatch m;
    if (!std::regex_search(line, m, kLogLine)) continue;
    Violation v;
    v.engine = Engine::kExternal;
    v.message = AssertMessage(Trim(m[3]));
    v.source_line = std::stoi(m[2]);
    out.push_back(std::move(v));
  }
  return out;
}

EngineOutcome ExternalEngineRun(std::string_view harness_source, const EngineConfig& cfg) {
  EngineOutcome outcome;
  if (cfg.engine_path.empty()) {
    outcome.log_excerpt = "SYMTEE_ENGINE_PATH is not set";
    return outcome;
  }
  if (!Executable(cfg.engine_path)) {
    outcome.log_excerpt = "engine not executable: " + cfg.engine_path;
    return outcome;
  }
  if (!Executable(cfg.cc_path)) {
    outcome.log_excerpt = "compiler not found: " + cfg.cc_path;
    return outcome;
  }
  std::string tmpl = (fs::temp_directory_path() / "symtee-engine-XXXXXX").string();
  if (!::mkdtemp(tmpl.data())) {
    outcome.status = EngineOutcome::Status::kEngineFailure;
    outcome.log_excerpt = "cannot create workspace";
    return outcome;
  }
  fs::path ws(tmpl);
  struct Cleanup {
    fs::path dir;
    bool keep;
    ~Cleanup() {
      std::error_code ec;
      if (!keep) fs::remove_all(dir, ec);
    }
  } cleanup{ws, cfg.keep_workspace};
  if (cfg.keep_workspace) outcome.workspace = ws.string();
  {
    std::ofstream f(ws / "harness.c", std::ios::binary);
    f << harness_source;
  }
  std::string compiler = cfg.cc_path.find('/') == std::string::npos
                             ? cfg.cc_path
                             : fs::absolute(cfg.cc_path).string();
  std::vector<std::string> cc = {compiler, "-emit-llvm", "-c", "-g", "-O0",
                                 "-Xclang", "-disable-O0-optnone"};
  if (!cfg.include_dir.empty()) cc.push_back("-I" + fs::absolute(cfg.include_dir).string());
  cc.insert(cc.end(), {"harness.c", "-o", "harness.bc"});
  ProcessResult compiled = RunProcess(cc, ws, ws / "cc.log", cfg.timeout_secs);
  if (compiled.exit_code != 0) {
    outcome.status = EngineOutcome::Status::kEngineFailure;
    outcome.log_excerpt = Tail(compiled.timed_out ? "compiler timed out\n" + compiled.output
                                                  : compiled.output);
    return outcome;
  }
  std::string engine = cfg.engine_path.find('/') == std::string::npos
                           ? cfg.engine_path
                           : fs::absolute(cfg.engine_path).string();
  std::vector<std::string> run = {engine, "--output-dir=klee-out",
                                  "--max-time=" + std::to_string(cfg.timeout_secs) + "s"};
  run.insert(run.end(), cfg.extra_args.begin(), cfg.extra_args.end());
  run.push_back("harness.bc");
  // Grace period on top of the engine's own budget.
  ProcessResult ran = RunProcess(run, ws, ws / "engine.log", cfg.timeout_secs + 10);
  fs::path out_dir = ws / "klee-out";
  if (ran.timed_out || !fs::is_directory(out_dir)) {
    outcome.status = EngineOutcome::Status::kEngineFailure;
    outcome.log_excerpt = Tail((ran.timed_out ? "engine timed out\n" : "") + ran.output);
    return outcome;
  }
  RawEngineOutput raw;
  raw.log = ran.output;
  for (const auto& entry : fs::directory_iterator(out_dir)) {
    if (!entry.is_regular_file()) continue;
    std::string name = entry.path().filename().string();
    if (name == "messages.txt") {
      raw.log += Slurp(entry.path());
    } else if (entry.path().extension() == ".ktest" || entry.path().extension() == ".err") {
      raw.artifacts[name] = Slurp(entry.path());
    }
  }
  try {
    outcome.violations = ParseEngineOutput(raw);
  } catch (const MalformedOutput& e) {
    outcome.status = EngineOutcome::Status::kEngineFailure;
    outcome.log_excerpt = std::string("malformed engine output: ") + e.what();
    return outcome;
  }
  outcome.status = outcome.violations.empty() ? EngineOutcome::Status::kClean
                                              : EngineOutcome::Status::kViolations;
  outcome.log_excerpt = Tail(raw.log);
  return outcome;
}

}  // namespace symtee::symexec
