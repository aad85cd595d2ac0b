// Copyright 2026 The qgae Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "qgae/qgae.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct ConfigDeleter {
  void operator()(qgae_config* c) const { qgae_config_free(c); }
};
using ConfigPtr = std::unique_ptr<qgae_config, ConfigDeleter>;

struct CString {
  char* p = nullptr;
  ~CString() { qgae_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

// Config-file/flag errors are usage errors; everything else is a failed run.
int report(qgae_status s) {
  std::cerr << "qgae: error: " << qgae_last_error() << " (" << qgae_status_name(s) << ")\n";
  return s == QGAE_CONFIG || s == QGAE_INVALID_ARGUMENT ? kExitUsage : kExitFailure;
}

struct RunFlags {
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<int> n;
  std::optional<std::string> secret;
  std::optional<int> epochs;
  std::optional<int> seeds;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;

  void attach(CLI::App* app, bool with_seeds) {
    app->add_option("-c,--config", config_path, "key = value config file")->check(CLI::ExistingFile);
    app->add_option("--set", sets, "override a config key, key=value (repeatable)");
    app->add_option("--n", n, "BV data qubits (bv.n)");
    app->add_option("--secret", secret, "BV secret string, decimal, 0b or 0x (bv.secret)");
    app->add_option("--epochs", epochs, "agent episodes (agent.epochs)");
    if (with_seeds) app->add_option("--seeds", seeds, "number of seeds (n_seeds)");
    app->add_option("--seed", seed, "root seed (seed)");
    app->add_option("-o,--out", out, "output directory (out_dir)");
  }

  // Returns a status; `cfg` is set on success.
  qgae_status load(ConfigPtr& cfg) const {
    std::vector<std::pair<std::string, std::string>> kv;
    for (const std::string& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) {
        std::cerr << "qgae: error: --set expects key=value, got '" << s << "'\n";
        return QGAE_CONFIG;
      }
      auto trim = [](std::string t) {
        const auto b = t.find_first_not_of(" \t");
        const auto e = t.find_last_not_of(" \t");
        return b == std::string::npos ? std::string() : t.substr(b, e - b + 1);
      };
      kv.emplace_back(trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
    }
    if (n) kv.emplace_back("bv.n", std::to_string(*n));
    if (secret) kv.emplace_back("bv.secret", *secret);
    if (epochs) kv.emplace_back("agent.epochs", std::to_string(*epochs));
    if (seeds) kv.emplace_back("n_seeds", std::to_string(*seeds));
    if (seed) kv.emplace_back("seed", std::to_string(*seed));
    if (out) kv.emplace_back("out_dir", *out);

    std::vector<const char*> keys, values;
    for (const auto& [k, v] : kv) {
      keys.push_back(k.c_str());
      values.push_back(v.c_str());
    }
    qgae_config* raw = nullptr;
    const qgae_status s = qgae_config_load(config_path.empty() ? nullptr : config_path.c_str(),
                                           keys.data(), values.data(), kv.size(), &raw);
    cfg.reset(raw);
    return s;
  }
};

// The configured out_dir, unless it is the built-in default and QGAE_OUT_ROOT
// names another root; then <root>/<command>.
std::string output_dir(const qgae_config* cfg, const std::string& command) {
  CString v;
  if (qgae_config_get(cfg, "out_dir", &v.p) != QGAE_OK) return "runs";
  const std::string dir = v.str();
  const char* root = std::getenv("QGAE_OUT_ROOT");
  if (dir == "runs" && root && *root) return std::string(root) + "/" + command;
  return dir;
}

int cmd_gen_bv(int n, const std::string& secret, const std::string& out) {
  const char* keys[] = {"bv.n", "bv.secret"};
  const std::string n_text = std::to_string(n);
  const char* values[] = {n_text.c_str(), secret.c_str()};
  qgae_config* raw = nullptr;
  if (qgae_status s = qgae_config_load(nullptr, keys, values, 2, &raw); s != QGAE_OK) return report(s);
  ConfigPtr cfg(raw);
  CString secret_value;
  if (qgae_status s = qgae_config_get(cfg.get(), "bv.secret", &secret_value.p); s != QGAE_OK) {
    return report(s);
  }
  CString qasm;
  const qgae_status s =
      qgae_bv_qasm(n, std::strtoull(secret_value.p, nullptr, 10), &qasm.p);
  if (s != QGAE_OK) return report(s);
  if (out.empty() || out == "-") {
    std::cout << qasm.str();
    return kExitOk;
  }
  std::ofstream f(out, std::ios::binary);
  f << qasm.str();
  if (!f) {
    std::cerr << "qgae: error: cannot write '" << out << "'\n";
    return kExitFailure;
  }
  int depth = 0;
  qgae_qasm_depth(qasm.p, &depth);
  std::cout << "wrote " << out << " (BV-" << n << ", depth " << depth << ")\n";
  return kExitOk;
}

void print_run(const char* label, const qgae_run_result& r, const std::string& dir) {
  std::cout << label << "=" << r.states << " epochs=" << r.epochs << " best_depth=" << r.best_depth
            << " episodes_at_target=" << r.episodes_at_target << "\n"
            << "outputs in " << dir << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum circuit rewriting with Q-learning and a DAG autoencoder"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(qgae_version()));

  int bv_n = 2;
  std::string bv_secret = "3";
  std::string bv_out;
  auto* gen = app.add_subcommand("gen-bv", "write a Bernstein-Vazirani circuit as QASM");
  gen->add_option("--n", bv_n, "data qubits")->capture_default_str();
  gen->add_option("--secret", bv_secret, "secret string, decimal, 0b or 0x")->capture_default_str();
  gen->add_option("-o,--out", bv_out, "output file (stdout when omitted)");

  RunFlags base_flags, vae_flags, enc_flags, cmp_flags;
  auto* base = app.add_subcommand("train-baseline", "train the exact-state agent and harvest its corpus");
  base_flags.attach(base, false);

  std::string corpus_path;
  auto* vae = app.add_subcommand("train-vae", "train the DAG autoencoder on a corpus");
  vae_flags.attach(vae, false);
  vae->add_option("--corpus", corpus_path, "corpus.txt from train-baseline")
      ->required()
      ->check(CLI::ExistingFile);

  std::string model_dir;
  auto* enc = app.add_subcommand("train-encoded", "train an agent on encoder state keys");
  enc_flags.attach(enc, false);
  enc->add_option("--model", model_dir, "directory holding model.ckpt and model.json")
      ->required()
      ->check(CLI::ExistingDirectory);

  bool quiet = false;
  auto* cmp = app.add_subcommand("compare", "run baseline, encoder training and encoded agent per seed");
  cmp_flags.attach(cmp, true);
  cmp->add_flag("-q,--quiet", quiet, "no progress lines");

  int verify_circuits = 200;
  std::uint64_t verify_seed = 7;
  auto* ver = app.add_subcommand("verify", "template soundness and DAG validity on random circuits");
  ver->add_option("--circuits", verify_circuits, "random circuits to test")->capture_default_str();
  ver->add_option("--seed", verify_seed, "rng seed")->capture_default_str();

  int grad_dags = 3;
  std::uint64_t grad_seed = 1;
  double grad_tol = 1e-4;
  auto* grad = app.add_subcommand("grad-check", "finite-difference check of the autoencoder loss");
  grad->add_option("--dags", grad_dags, "random DAGs to check")->capture_default_str();
  grad->add_option("--seed", grad_seed, "rng seed")->capture_default_str();
  grad->add_option("--tol", grad_tol, "largest accepted relative error")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (gen->parsed()) return cmd_gen_bv(bv_n, bv_secret, bv_out);

  if (ver->parsed()) {
    qgae_verify_result r{};
    CString msgs;
    if (qgae_status s = qgae_verify(verify_circuits, verify_seed, &r, &msgs.p); s != QGAE_OK) {
      return report(s);
    }
    std::cout << "circuits=" << r.circuits << " actions=" << r.actions
              << " unitary_failures=" << r.unitary_failures << " dag_failures=" << r.dag_failures
              << " max_deviation=" << r.max_deviation << "\n"
              << msgs.str();
    const bool ok = r.unitary_failures == 0 && r.dag_failures == 0;
    std::cout << (ok ? "PASS" : "FAIL") << "\n";
    return ok ? kExitOk : kExitFailure;
  }

  if (grad->parsed()) {
    double err = 0;
    if (qgae_status s = qgae_grad_check(grad_dags, grad_seed, &err); s != QGAE_OK) return report(s);
    const bool ok = err <= grad_tol;
    std::cout << "dags=" << grad_dags << " max_rel_error=" << err << " tol=" << grad_tol << "\n"
              << (ok ? "PASS" : "FAIL") << "\n";
    return ok ? kExitOk : kExitFailure;
  }

  ConfigPtr cfg;
  const RunFlags& flags = base->parsed() ? base_flags
                          : vae->parsed() ? vae_flags
                          : enc->parsed() ? enc_flags
                                          : cmp_flags;
  if (qgae_status s = flags.load(cfg); s != QGAE_OK) return report(s);
  const std::string command = app.get_subcommands().front()->get_name();
  const std::string dir = output_dir(cfg.get(), command);

  if (base->parsed()) {
    qgae_run_result r{};
    if (qgae_status s = qgae_train_baseline(cfg.get(), dir.c_str(), &r); s != QGAE_OK) return report(s);
    print_run("l_s", r, dir);
    return kExitOk;
  }
  if (vae->parsed()) {
    qgae_vae_result r{};
    if (qgae_status s = qgae_train_vae(cfg.get(), corpus_path.c_str(), dir.c_str(), &r); s != QGAE_OK) {
      return report(s);
    }
    std::cout << "corpus=" << r.corpus_size << " trained_on=" << r.trained_on
              << " final_loss=" << r.final_loss
              << " reconstruction_accuracy=" << r.reconstruction_accuracy << "\n"
              << "outputs in " << dir << "\n";
    return kExitOk;
  }
  if (enc->parsed()) {
    qgae_run_result r{};
    if (qgae_status s = qgae_train_encoded(cfg.get(), model_dir.c_str(), dir.c_str(), &r);
        s != QGAE_OK) {
      return report(s);
    }
    print_run("l_a", r, dir);
    return kExitOk;
  }

  qgae_compare_result r{};
  const auto progress = [](const char* line, void*) { std::cerr << line << "\n"; };
  const qgae_status s = qgae_compare(cfg.get(), dir.c_str(), quiet ? nullptr : +progress, nullptr, &r);
  if (s != QGAE_OK) return report(s);
  std::printf("seeds=%d median_l_s=%.1f median_l_a=%.1f median_improvement=%.2f%%\n", r.seeds,
              r.median_l_s, r.median_l_a, 100.0 * r.median_improvement);
  std::printf("seeds at target depth: qasm %d/%d, encoder %d/%d\n", r.optimal_qasm, r.seeds,
              r.optimal_encoder, r.seeds);
  std::cout << "outputs in " << dir << "\n";
  return kExitOk;
}
