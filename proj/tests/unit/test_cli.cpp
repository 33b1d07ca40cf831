// Copyright (c) protopart contributors.
// SPDX-License-Identifier: MIT
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "fixtures.hpp"
#include "protopart/cli.hpp"

using namespace protopart;
using namespace protopart::testing;
namespace cli = protopart::cli;

namespace {

struct Capture {
    std::ostringstream out;
    std::ostringstream err;
    cli::Streams io() { return {out, err}; }
};

std::string temp_path(const std::string& tag) { return "/tmp/protopart_cli_" + tag + "_" + std::to_string(::getpid()); }

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("analyze") {
        Capture c;
        CHECK(cli::cmd_analyze(fixture_path("dh.xml"), {}, c.io()) == cli::exit_ok);
        CHECK(c.out.str().find("intg(dhsec.ssec) = false\n") != std::string::npos);

        Capture dump;
        auto path = temp_path("dump");
        CHECK(cli::cmd_analyze(fixture_path("enc.xml"), {.dump_path = path}, dump.io()) == cli::exit_ok);
        CHECK(dump.out.str().empty());
        CHECK(read_file(path) == dump_assignment(solve_fixture(load_fixture("enc.xml"))));
        std::remove(path.c_str());

        Capture conflict;
        auto out = temp_path("conflict");
        CHECK(cli::cmd_analyze(fixture_path("dh_keystore_integrity.xml"), {.out_path = out}, conflict.io()) ==
              cli::exit_failure);
        CHECK(conflict.out.str().rfind("UNSAT: ", 0) == 0);
        CHECK(read_file(out).find("conflict=\"true\"") != std::string::npos);
        std::remove(out.c_str());

        Capture missing;
        CHECK(cli::cmd_analyze("/nonexistent.xml", {}, missing.io()) == cli::exit_input);
        CHECK(missing.err.str().find("cannot open") != std::string::npos);
    }

    TEST_CASE("structural errors are input errors") {
        auto path = temp_path("broken");
        {
            std::ofstream f(path);
            f << "<model><rng id=\"r\"/></model>";
        }
        Capture c;
        CHECK(cli::cmd_analyze(path, {}, c.io()) == cli::exit_input);
        std::remove(path.c_str());
    }

    TEST_CASE("partition") {
        Capture c;
        CHECK(cli::cmd_partition(fixture_path("dh.xml"), {.strategy = "branch"}, c.io()) == cli::exit_ok);
        auto text = c.out.str();
        CHECK(text.find("partition=\"K5\"") != std::string::npos);
        CHECK(text.find("POLICY dhsec.ssec -> Keystore.data [K5 -> K1] conf=true intg=false") != std::string::npos);
        CHECK(text.find("Partitioned (branch)") != std::string::npos);

        Capture bad;
        CHECK(cli::cmd_partition(fixture_path("dh.xml"), {.strategy = "bogus"}, bad.io()) == cli::exit_usage);
        Capture unsat;
        CHECK(cli::cmd_partition(fixture_path("dh_keystore_integrity.xml"), {}, unsat.io()) == cli::exit_failure);
        Capture weights;
        CHECK(cli::cmd_partition(fixture_path("dh.xml"), {.weights_path = "/nonexistent"}, weights.io()) ==
              cli::exit_input);
    }

    TEST_CASE("check") {
        Capture c;
        CHECK(cli::cmd_check(fixture_path("dh.xml"), c.io()) == cli::exit_ok);
        CHECK(c.out.str() == "OK: 1 assertion(s) hold\n");
        Capture none;
        CHECK(cli::cmd_check(fixture_path("enc.xml"), none.io()) == cli::exit_ok);

        auto path = temp_path("assert");
        auto text = read_file(fixture_path("enc.xml"));
        auto pos = text.find("<flow sarg=\"Cipher\" sink=\"in\" darg=\"Msg\"/>");
        REQUIRE(pos != std::string::npos);
        text.replace(pos, 44,
                     "<flow sarg=\"Cipher\" sink=\"in\" darg=\"Msg\"><assert integrity=\"true\">authentic</assert></flow>");
        {
            std::ofstream f(path);
            f << text;
        }
        Capture failing;
        CHECK(cli::cmd_check(path, failing.io()) == cli::exit_failure);
        CHECK(failing.out.str().rfind("ASSERT FAIL enc.Cipher -> in.Msg", 0) == 0);
        std::remove(path.c_str());
    }

    TEST_CASE("run") {
        Capture c;
        auto trace = temp_path("trace");
        CHECK(cli::cmd_run(fixture_path("dh_two_party.xml"), {.seed = 1, .trace_path = trace}, c.io()) == cli::exit_ok);
        auto first = read_file(trace);
        CHECK(cli::cmd_run(fixture_path("dh_two_party.xml"), {.seed = 1, .trace_path = trace}, c.io()) == cli::exit_ok);
        CHECK(read_file(trace) == first);
        std::remove(trace.c_str());

        Capture budget;
        CHECK(cli::cmd_run(fixture_path("dh_two_party.xml"), {.max_steps = 3}, budget.io()) == cli::exit_failure);
        CHECK(budget.out.str().find("step budget of 3 exhausted") != std::string::npos);

        Capture unbound;
        CHECK(cli::cmd_run(fixture_path("enc.xml"), {}, unbound.io()) == cli::exit_failure);
        CHECK(unbound.err.str().find("unbound") != std::string::npos);
    }

    TEST_CASE("render") {
        Capture plain;
        CHECK(cli::cmd_render(fixture_path("enc.xml"), {}, plain.io()) == cli::exit_ok);
        CHECK(plain.out.str().find("purple") == std::string::npos);
        Capture solved;
        CHECK(cli::cmd_render(fixture_path("enc.xml"), {.solved = true}, solved.io()) == cli::exit_ok);
        CHECK(solved.out.str().find("purple") != std::string::npos);
        Capture parts;
        CHECK(cli::cmd_render(fixture_path("dh.xml"), {.solved = true, .partitions = true, .strategy = "const"},
                              parts.io()) == cli::exit_ok);
        CHECK(parts.out.str().find("cluster_K5") != std::string::npos);
    }

    TEST_CASE("metrics") {
        Capture c;
        CHECK(cli::cmd_metrics(fixture_path("enc.xml"), {.strategy = "none"}, c.io()) == cli::exit_ok);
        auto text = c.out.str();
        CHECK(text.find("process_count=5\nipc_channels=4\ntcb_none=20\ntcb_intg=5\ntcb_conf_intg=100\n") !=
              std::string::npos);
        Capture bad;
        CHECK(cli::cmd_metrics(fixture_path("enc.xml"), {.strategy = "all"}, bad.io()) == cli::exit_usage);
    }
}
