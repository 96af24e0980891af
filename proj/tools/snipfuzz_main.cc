// Copyright 2026 The snipfuzz Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// snipfuzz: black-box network fuzzer driven by response feedback.
//
//   snipfuzz fuzz --target 127.0.0.1:9000 --corpus seeds.json --rng-seed 1
//   snipfuzz infer --target 127.0.0.1:9000 --corpus seeds.json
//   snipfuzz replay out/findings.jsonl
//   snipfuzz eval-seg out/annotations.jsonl truth.jsonl
//   snipfuzz mock profiles/hue_light.json --port 9000
//
// Exit codes: 0 clean, 1 crashes found (or replay diverged), 2 config error,
// 3 target unreachable.

#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "snipfuzz/campaign.h"
#include "snipfuzz/config.h"
#include "snipfuzz/corpus.h"
#include "snipfuzz/errors.h"
#include "snipfuzz/findings_log.h"
#include "snipfuzz/hex.h"
#include "snipfuzz/mock_device.h"
#include "snipfuzz/mock_server.h"
#include "snipfuzz/report.h"
#include "snipfuzz/segmentation.h"
#include "snipfuzz/transport.h"
#include "spdlog/spdlog.h"

namespace snipfuzz {
namespace {

constexpr int kExitClean = 0;
constexpr int kExitCrashes = 1;
constexpr int kExitConfig = 2;
constexpr int kExitUnreachable = 3;

std::atomic<bool> interrupted{false};

int Fail(const absl::Status& st) {
  std::cerr << "snipfuzz: " << st.ToString() << "\n";
  if (IsError(st, ErrorKind::kTargetUnreachable) ||
      IsError(st, ErrorKind::kConnectionError)) {
    return kExitUnreachable;
  }
  return kExitConfig;
}

// Campaign flags shared by `fuzz` and `infer`. Empty strings / unset values
// leave the config file (or the defaults) alone.
struct CampaignFlags {
  std::string config_path;
  std::string target;
  std::string proto;
  std::string framing;
  std::string corpus;
  std::string mode;
  std::optional<double> time_budget;
  std::optional<uint64_t> exec_budget;
  std::optional<uint64_t> rng_seed;
  std::string out;
  std::optional<int> response_timeout_ms;
  std::optional<int> probe_interval_ms;
  std::optional<int> boot_wait_ms;
  std::optional<uint64_t> havoc_budget;

  void Register(CLI::App* app, bool budgets) {
    app->add_option("--config", config_path, "campaign config (JSON)");
    app->add_option("--target", target, "host:port of the device");
    app->add_option("--proto", proto, "tcp or udp")
        ->check(CLI::IsMember({"tcp", "udp"}));
    app->add_option("--framing", framing,
                    "delim:<hex> | len:<1|2|4>:<be|le> | raw");
    app->add_option("--corpus", corpus, "seed corpus (JSON)");
    app->add_option("--rng-seed", rng_seed, "seed for every random choice");
    app->add_option("--response-timeout-ms", response_timeout_ms);
    app->add_option("--probe-interval-ms", probe_interval_ms,
                    "gap between the two sends of a probe pair");
    app->add_option("--boot-wait-ms", boot_wait_ms,
                    "wait after a restart before resending");
    if (!budgets) return;
    app->add_option("--mode", mode, "snippet or nosnippet")
        ->check(CLI::IsMember({"snippet", "nosnippet"}));
    app->add_option("--time-budget", time_budget, "seconds");
    app->add_option("--exec-budget", exec_budget, "test transmissions");
    app->add_option("--havoc-budget", havoc_budget, "havoc plans per message");
    app->add_option("--out", out, "output directory");
  }

  absl::StatusOr<CampaignConfig> Build() const {
    CampaignConfig config;
    if (!config_path.empty()) {
      absl::StatusOr<CampaignConfig> loaded = LoadConfig(config_path);
      if (!loaded.ok()) return loaded.status();
      config = *std::move(loaded);
    } else if (!rng_seed) {
      return MakeError(ErrorKind::kInvalidConfig,
                       "--rng-seed is required (or a --config that sets it)");
    }
    if (!target.empty()) {
      if (absl::Status st = ParseTargetAddress(target, config.target); !st.ok()) {
        return st;
      }
    }
    if (!proto.empty()) {
      config.target.protocol = proto == "udp" ? Protocol::kUdp : Protocol::kTcp;
    }
    if (!framing.empty()) {
      absl::StatusOr<Framing> f = Framing::Parse(framing);
      if (!f.ok()) return f.status();
      config.target.framing = *f;
    }
    if (!corpus.empty()) config.corpus_path = corpus;
    if (!mode.empty()) {
      absl::StatusOr<Mode> m = ParseMode(mode);
      if (!m.ok()) return m.status();
      config.mode = *m;
    }
    if (time_budget) config.time_budget_s = *time_budget;
    if (exec_budget) config.exec_budget = *exec_budget;
    if (rng_seed) config.rng_seed = *rng_seed;
    if (!out.empty()) config.out_dir = out;
    if (response_timeout_ms) config.target.response_timeout_ms = *response_timeout_ms;
    if (probe_interval_ms) config.target.probe_repeat_interval_ms = *probe_interval_ms;
    if (boot_wait_ms) config.target.boot_wait_ms = *boot_wait_ms;
    if (havoc_budget) config.mutation.havoc_budget = *havoc_budget;
    if (config.corpus_path.empty()) {
      return MakeError(ErrorKind::kInvalidConfig, "no corpus given (--corpus)");
    }
    if (config.target.port == 0) {
      return MakeError(ErrorKind::kInvalidConfig, "no target given (--target)");
    }
    if (absl::Status st = config.Validate(); !st.ok()) return st;
    return config;
  }
};

int RunFuzz(const CampaignFlags& flags) {
  absl::StatusOr<CampaignConfig> config = flags.Build();
  if (!config.ok()) return Fail(config.status());
  absl::StatusOr<SeedCorpus> corpus = LoadSeedCorpus(config->corpus_path);
  if (!corpus.ok()) return Fail(corpus.status());

  NetworkSession session(config->target);
  if (absl::Status st = session.Open(); !st.ok()) return Fail(st);
  std::unique_ptr<Restarter> restarter =
      MakeRestarter(corpus->restart_command, config->target);
  if (restarter == nullptr) {
    spdlog::warn("corpus has no restart_command; crashes cannot be confirmed");
  }

  const std::filesystem::path out_dir = config->out_dir;
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    return Fail(MakeError(ErrorKind::kInvalidConfig, "cannot create ",
                          out_dir.string(), ": ", ec.message()));
  }
  std::ofstream log_file(out_dir / "findings.jsonl", std::ios::trunc);
  if (!log_file) {
    return Fail(MakeError(ErrorKind::kInvalidConfig, "cannot write ",
                          (out_dir / "findings.jsonl").string()));
  }
  FindingsLog log(&log_file);
  Campaign campaign(*config, *std::move(corpus), session, restarter.get(), &log);
  FuzzReport report = campaign.Run();
  log_file.close();
  if (absl::Status st = WriteReport(report, out_dir); !st.ok()) {
    std::cerr << "snipfuzz: " << st.ToString() << "\n";
    return kExitConfig;
  }
  std::cout << ReportSummaryText(report);
  std::cout << "report written to " << out_dir.string() << "\n";
  if (report.stats.stop_reason == "target_unresponsive") return kExitUnreachable;
  return report.findings.empty() ? kExitClean : kExitCrashes;
}

std::string DescribeSet(const Message& message, const SnippetSet& set) {
  std::string line = absl::StrFormat("  round %d:", set.round);
  for (const Snippet& s : set.snippets) {
    const ByteArray bytes(message.begin() + s.start, message.begin() + s.end);
    absl::StrAppendFormat(&line, " [%s]", EscapeBytes(bytes));
  }
  return line;
}

int RunInfer(const CampaignFlags& flags, const std::string& annotations_path) {
  absl::StatusOr<CampaignConfig> config = flags.Build();
  if (!config.ok()) return Fail(config.status());
  absl::StatusOr<SeedCorpus> corpus = LoadSeedCorpus(config->corpus_path);
  if (!corpus.ok()) return Fail(corpus.status());
  NetworkSession session(config->target);
  if (absl::Status st = session.Open(); !st.ok()) return Fail(st);
  std::unique_ptr<Restarter> restarter =
      MakeRestarter(corpus->restart_command, config->target);

  const SeedCorpus initial = *corpus;
  Campaign campaign(*config, *std::move(corpus), session, restarter.get());
  for (const Seed& seed : initial.seeds) {
    for (size_t i = 0; i < seed.sequence.size(); ++i) {
      absl::StatusOr<DeterminationResult> d = campaign.Determine(seed.id, i);
      if (!d.ok()) {
        std::cerr << "seed " << seed.id << " message " << i << ": "
                  << d.status().ToString() << "\n";
        continue;
      }
      std::cout << "seed " << seed.id << " message " << i << ": "
                << EscapeBytes(seed.sequence[i]) << "\n";
      const Seed* stored = campaign.corpus().Find(seed.id);
      auto it = stored->snippet_annotations.find(i);
      if (it == stored->snippet_annotations.end()) {
        std::cout << "  (incomplete: " << d->crashes << " probes crashed)\n";
        continue;
      }
      for (const SnippetSet& set : it->second) {
        std::cout << DescribeSet(seed.sequence[i], set) << "\n";
      }
    }
  }
  FuzzReport report = campaign.Report();
  if (!annotations_path.empty()) {
    std::ofstream out(annotations_path, std::ios::trunc);
    for (const Annotation& a : report.annotations) {
      out << AnnotationToJsonLine(a) << "\n";
    }
    if (!out) {
      return Fail(MakeError(ErrorKind::kInvalidConfig, "cannot write ",
                            annotations_path));
    }
  }
  return report.findings.empty() ? kExitClean : kExitCrashes;
}

int RunReplay(const std::string& log_path, const std::string& target,
              const std::string& out) {
  absl::StatusOr<LoggedCampaign> logged = ReadFindingsLog(log_path);
  if (!logged.ok()) return Fail(logged.status());
  if (!target.empty()) {
    if (absl::Status st = ParseTargetAddress(target, logged->config.target);
        !st.ok()) {
      return Fail(st);
    }
  }
  NetworkSession session(logged->config.target);
  if (absl::Status st = session.Open(); !st.ok()) return Fail(st);
  std::unique_ptr<Restarter> restarter =
      MakeRestarter(logged->corpus.restart_command, logged->config.target);
  ReplayResult result = Replay(*logged, session, restarter.get());
  std::cout << absl::StrFormat(
      "replayed %d executions: %d divergent records, %d crashes (logged %d)\n",
      result.execs.size(), result.divergences, result.report.findings.size(),
      logged->crashes);
  if (result.first_divergence) {
    std::cout << "first divergence at exec " << *result.first_divergence << "\n";
  }
  if (!out.empty()) {
    if (absl::Status st = WriteReport(result.report, out); !st.ok()) {
      std::cerr << "snipfuzz: " << st.ToString() << "\n";
      return kExitConfig;
    }
  }
  return result.divergences == 0 && result.report.findings.empty()
             ? kExitClean
             : kExitCrashes;
}

int RunEvalSeg(const std::string& annotations_path, const std::string& truth_path) {
  std::ifstream a(annotations_path), t(truth_path);
  if (!a) return Fail(MakeError(ErrorKind::kInvalidConfig, "cannot read ", annotations_path));
  if (!t) return Fail(MakeError(ErrorKind::kInvalidConfig, "cannot read ", truth_path));
  absl::StatusOr<std::vector<Annotation>> annotations = ReadAnnotations(a);
  if (!annotations.ok()) return Fail(annotations.status());
  absl::StatusOr<std::vector<GroundTruth>> truth = ReadGroundTruth(t);
  if (!truth.ok()) return Fail(truth.status());
  absl::StatusOr<SegmentationEvaluation> eval =
      EvaluateSegmentation(*annotations, *truth);
  if (!eval.ok()) return Fail(eval.status());
  for (const MessageScore& s : eval->messages) {
    std::cout << absl::StrFormat("%s/%d  round %d  %.3f\n", s.seed,
                                 s.message_index, s.best_round, s.similarity);
  }
  std::cout << absl::StrFormat("messages %d  median %.3f  mean %.3f\n",
                               eval->messages.size(), eval->median, eval->mean);
  return kExitClean;
}

int ExportGroundTruth(const mock::DeviceProfile& profile,
                      const std::string& corpus_path, const std::string& out) {
  absl::StatusOr<SeedCorpus> corpus = LoadSeedCorpus(corpus_path);
  if (!corpus.ok()) return Fail(corpus.status());
  mock::MockDevice device(profile);
  std::ofstream file;
  std::ostream* sink = &std::cout;
  if (!out.empty()) {
    file.open(out, std::ios::trunc);
    if (!file) return Fail(MakeError(ErrorKind::kInvalidConfig, "cannot write ", out));
    sink = &file;
  }
  for (const Seed& seed : corpus->seeds) {
    for (size_t i = 0; i < seed.sequence.size(); ++i) {
      std::optional<std::vector<uint8_t>> labels =
          device.GroundTruth(seed.sequence[i]);
      if (!labels) {
        spdlog::warn("seed {} message {} is not accepted by the device; skipped",
                     seed.id, i);
        continue;
      }
      *sink << GroundTruthToJsonLine({seed.id, i, *labels}) << "\n";
    }
  }
  return kExitClean;
}

int RunMock(const std::string& profile_path, std::optional<uint16_t> port,
            const std::string& host, const std::string& truth_corpus,
            const std::string& out) {
  absl::StatusOr<mock::DeviceProfile> profile = mock::LoadDeviceProfile(profile_path);
  if (!profile.ok()) return Fail(profile.status());
  if (!truth_corpus.empty()) return ExportGroundTruth(*profile, truth_corpus, out);

  const uint16_t listen_port = port.value_or(profile->port);
  auto device = std::make_shared<mock::MockDevice>(*profile);
  mock::MockServer server(device, listen_port, host);
  if (absl::Status st = server.Start(); !st.ok()) return Fail(st);
  std::cout << absl::StrFormat("%s (%s) listening on %s:%d, control on port %d\n",
                               profile->name,
                               profile->protocol == Protocol::kUdp ? "udp" : "tcp",
                               host, server.port(), server.control_port())
            << std::flush;
  std::signal(SIGINT, [](int) { interrupted = true; });
  std::signal(SIGTERM, [](int) { interrupted = true; });
  while (!interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  server.Stop();
  return kExitClean;
}

}  // namespace
}  // namespace snipfuzz

int main(int argc, char** argv) {
  using namespace snipfuzz;
  CLI::App app{"Black-box network fuzzer guided by response feedback"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "debug logging");

  CampaignFlags fuzz_flags;
  CLI::App* fuzz = app.add_subcommand("fuzz", "run a fuzzing campaign");
  fuzz_flags.Register(fuzz, true);

  CampaignFlags infer_flags;
  std::string annotations_out;
  CLI::App* infer = app.add_subcommand(
      "infer", "determine snippets of every seed message and print them");
  infer_flags.Register(infer, false);
  infer->add_option("--annotations", annotations_out,
                    "write annotations (JSON lines) here");

  std::string log_path, replay_target, replay_out;
  CLI::App* replay = app.add_subcommand("replay", "re-run a logged campaign");
  replay->add_option("log", log_path, "findings.jsonl")->required();
  replay->add_option("--target", replay_target, "override the logged target");
  replay->add_option("--out", replay_out, "write the replay report here");

  std::string annotations_path, truth_path;
  CLI::App* eval = app.add_subcommand(
      "eval-seg", "score inferred snippets against ground-truth labels");
  eval->add_option("annotations", annotations_path)->required();
  eval->add_option("ground-truth", truth_path)->required();

  std::string profile_path, mock_host = "127.0.0.1", truth_corpus, truth_out;
  std::optional<uint16_t> mock_port;
  CLI::App* mock = app.add_subcommand("mock", "serve a mock device profile");
  mock->add_option("profile", profile_path)->required();
  mock->add_option("--port", mock_port, "fuzzing port (control is port + 1)");
  mock->add_option("--host", mock_host);
  mock->add_option("--ground-truth", truth_corpus,
                   "instead of serving, label this corpus and exit");
  mock->add_option("--out", truth_out, "ground-truth output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);

  if (*fuzz) return RunFuzz(fuzz_flags);
  if (*infer) return RunInfer(infer_flags, annotations_out);
  if (*replay) return RunReplay(log_path, replay_target, replay_out);
  if (*eval) return RunEvalSeg(annotations_path, truth_path);
  if (*mock) return RunMock(profile_path, mock_port, mock_host, truth_corpus, truth_out);
  return 2;
}
