// Copyright 2026 The aibomgen Authors
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

#include <CLI11.hpp>
#include <atomic>
#include <chrono>
#include <csignal>
#include <iostream>
#include <thread>

#include "aibomgen/canonical.hpp"
#include "aibomgen/errors.hpp"
#include "aibomgen/platform.hpp"

namespace {

std::atomic<bool> g_stop{false};

void handle_signal(int) { g_stop = true; }

}  // namespace

int main(int argc, char** argv)
{
    using namespace aibomgen;

    CLI::App app{"aibomgen platform server"};
    PlatformConfig config = PlatformConfig::from_environment();
    bool dump_openapi = false;

    app.add_option("--data-dir", config.data_dir,
                   "Platform data directory (env AIBOMGEN_DATA_DIR)");
    app.add_option("--listen", config.listen_addr,
                   "Listen address (env AIBOMGEN_LISTEN_ADDR)");
    app.add_option("--port", config.listen_port, "Listen port");
    app.add_option("--signing-key", config.signing_key_path,
                   "Ed25519 private key PEM (env AIBOMGEN_SIGNING_KEY)");
    app.add_option("--public-key", config.public_key_path,
                   "Ed25519 public key PEM (env AIBOMGEN_PUBLIC_KEY)");
    app.add_option("--tokens", config.tokens_path,
                   "Bearer token table JSON (env AIBOMGEN_TOKENS_FILE)");
    app.add_option("--advisory-db", config.advisory_db_path,
                   "Advisory database JSON (env AIBOMGEN_ADVISORY_DB)");
    app.add_option("--workers", config.workers, "Worker threads");
    app.add_option("--lease-seconds", config.lease_seconds,
                   "Job lease duration");
    app.add_option("--scan-interval", config.scan_interval_seconds,
                   "Vulnerability scan interval in seconds");
    app.add_flag("--dump-openapi", dump_openapi,
                 "Print the OpenAPI description and exit");

    CLI11_PARSE(app, argc, argv);

    try {
        if (dump_openapi && config.data_dir.empty()) config.data_dir = "/tmp/aibomgen-openapi";
        Platform platform{config};
        if (dump_openapi) {
            std::cout << platform.gateway().openapi().dump(2) << "\n";
            return 0;
        }

        platform.start_workers();
        int port = platform.start_gateway();
        std::cout << "aibomgen listening on " << config.listen_addr << ":"
                  << port << "\n";
        std::cout << "data dir: " << platform.config().data_dir << "\n";
        std::cout << "public key id: " << platform.key().key_id() << "\n";

        std::signal(SIGINT, handle_signal);
        std::signal(SIGTERM, handle_signal);
        while (!g_stop) {
            platform.orchestrator().tick();
            std::this_thread::sleep_for(std::chrono::milliseconds(500));
        }
        platform.stop();
        return 0;
    } catch (const Error& e) {
        std::cerr << "fatal: " << e.what() << "\n";
        return 2;
    }
}
