// Copyright (c) protopart contributors.
// SPDX-License-Identifier: MIT
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include <boost/multiprecision/cpp_int.hpp>
#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include "fixtures.hpp"
#include "protopart/executor.hpp"
#include "protopart/registry.hpp"
#include "protopart/tcp.hpp"

using namespace protopart;
using namespace protopart::testing;

namespace {

Instance make(const std::string& kind, const std::string& name, std::vector<std::string> ins = {},
              std::vector<std::string> outs = {}, std::map<std::string, std::string> config = {}) {
    auto inst = bind_instance(PrimitiveRegistry::builtin().make_spec(kind, ins, outs), name);
    inst.config = std::move(config);
    return inst;
}

Bytes text(std::string_view s) { return {s.begin(), s.end()}; }

std::vector<Bytes> eval(const Instance& inst, const std::vector<Bytes>& in) {
    SplitMix64 rng(1);
    return evaluate_primitive(inst, in, rng);
}

/// Square-and-multiply, kept separate from the library's modular exponentiation.
boost::multiprecision::cpp_int slow_pow(boost::multiprecision::cpp_int base, boost::multiprecision::cpp_int exp,
                                        const boost::multiprecision::cpp_int& mod) {
    boost::multiprecision::cpp_int result = 1;
    base %= mod;
    while (exp > 0) {
        if ((exp & 1) != 0) {
            result = (result * base) % mod;
        }
        base = (base * base) % mod;
        exp >>= 1;
    }
    return result;
}

boost::multiprecision::cpp_int as_int(const Bytes& b) {
    boost::multiprecision::cpp_int v = 0;
    for (auto byte : b) {
        v = (v << 8) | byte;
    }
    return v;
}

std::uint16_t test_port(int offset) { return static_cast<std::uint16_t>(21000 + (::getpid() % 2000) * 4 + offset); }

}  // namespace

TEST_SUITE("executor") {
    TEST_CASE("payload syntax") {
        CHECK(parse_payload("hex:00ff") == Bytes{0x00, 0xff});
        CHECK(parse_payload("text:hi") == text("hi"));
        CHECK(parse_payload("int:258") == Bytes{0x01, 0x02});
        CHECK(parse_payload("258") == Bytes{0x01, 0x02});
        CHECK(parse_payload("0") == Bytes{0x00});
        CHECK(parse_payload("hello") == text("hello"));
        CHECK_THROWS_AS(parse_payload("hex:0"), ExecutionError);
        CHECK_THROWS_AS(parse_payload("int:x1"), ExecutionError);
    }

    TEST_CASE("dhpub and dhsec") {
        auto pub = make("dhpub", "p");
        CHECK(eval(pub, {{2}, {5}, {3}}) == std::vector<Bytes>{{3}});
        auto sec = make("dhsec", "s");
        // pub^x mod m with g ignored: 3^4 mod 7 = 4
        CHECK(eval(sec, {{2}, {7}, {4}, {3}}) == std::vector<Bytes>{{4}});
        CHECK_THROWS_AS(eval(pub, {{2}, {1}, {3}}), ExecutionError);
    }

    TEST_CASE("transform ops") {
        auto branch = make("transform", "b", {"in"}, {"x", "y", "z"});
        auto out = eval(branch, {text("abc")});
        CHECK(out == std::vector<Bytes>(3, text("abc")));

        auto concat = make("transform", "c", {"a", "b"}, {"out"});
        CHECK(eval(concat, {text("ab"), text("cd")}) == std::vector<Bytes>{text("abcd")});

        auto split = make("transform", "s", {"in"}, {"a", "b", "c"}, {{"op", "split"}, {"lengths", "1,2"}});
        CHECK(eval(split, {text("abcdef")}) == std::vector<Bytes>{text("a"), text("bc"), text("def")});
        CHECK_THROWS_AS(eval(split, {text("ab")}), ExecutionError);
        auto bad_split = make("transform", "s", {"in"}, {"a", "b"}, {{"op", "split"}, {"lengths", "1,2"}});
        CHECK_THROWS_AS(eval(bad_split, {text("abcdef")}), ExecutionError);

        auto enc = make("transform", "e", {"a", "b"}, {"out"}, {{"op", "encode"}});
        auto dec = make("transform", "d", {"in"}, {"a", "b"}, {{"op", "decode"}});
        auto packed = eval(enc, {text("hello"), Bytes{}});
        CHECK(packed[0] == Bytes{0, 0, 0, 5, 'h', 'e', 'l', 'l', 'o', 0, 0, 0, 0});
        CHECK(eval(dec, packed) == std::vector<Bytes>{text("hello"), Bytes{}});
        CHECK_THROWS_AS(eval(dec, {Bytes{0, 0, 0, 9, 1}}), ExecutionError);
        CHECK_THROWS_AS(eval(make("transform", "u", {"in"}, {"o"}, {{"op", "rot13"}}), {text("x")}), ExecutionError);
    }

    TEST_CASE("counter mode round trip for every length up to 1024") {
        auto enc = make("enc_ctr", "enc");
        auto dec = make("dec_ctr", "dec");
        Bytes key = parse_payload("hex:000102030405060708090a0b0c0d0e0f");
        Bytes ctr{0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xfe};  // wraps during the run
        SplitMix64 data(99);
        for (std::size_t n = 0; n <= 1024; ++n) {
            auto plain = data.bytes(n);
            auto cipher = eval(enc, {plain, key, ctr})[0];
            CHECK(cipher.size() == n);
            CHECK(eval(dec, {cipher, key, ctr})[0] == plain);
        }
    }

    TEST_CASE("keystream block layout") {
        Bytes key{1, 2, 3};
        Bytes block_input = key;
        block_input.insert(block_input.end(), {0, 0, 0, 0, 0, 0, 0, 5});
        auto stream = sha256(block_input);
        Bytes zeros(32, 0);
        CHECK(ctr_xor(key, 5, zeros) == stream);
    }

    TEST_CASE("hmac, sign and verify") {
        auto tag = eval(make("hmac", "h"), {text("key"), text("The quick brown fox jumps over the lazy dog")})[0];
        CHECK(to_hex(tag) == "f7bc83f430538424b13298e6aa6fb143ef4d59a14946175997479dbc2d1a3cd8");
        auto sig = eval(make("sign", "s"), {text("k"), text("msg")})[0];
        auto verify = make("verify", "v");
        CHECK(eval(verify, {text("k"), text("msg"), sig})[0] == Bytes{1});
        CHECK(eval(verify, {text("k"), text("msh"), sig})[0] == Bytes{0});
    }

    TEST_CASE("rng is reproducible per seed") {
        auto rng = make("rng", "r");
        SplitMix64 a(5);
        SplitMix64 b(5);
        SplitMix64 c(6);
        auto x = evaluate_primitive(rng, {{16}}, a)[0];
        CHECK(x.size() == 16);
        CHECK(x == evaluate_primitive(rng, {{16}}, b)[0]);
        CHECK(x != evaluate_primitive(rng, {{16}}, c)[0]);
    }

    TEST_CASE("enc round trip fixture") {
        auto result = run_network(load_fixture("enc_roundtrip.xml"));
        CHECK(result.ok());
        CHECK(result.env_received.at("sink.Plain").front() == text("attack at dawn, bring snacks"));
        for (std::size_t i = 1; i < result.trace.size(); ++i) {
            CHECK(result.trace[i].step > result.trace[i - 1].step);
        }
    }

    TEST_CASE("fixture expectations are checked") {
        auto doc = load_fixture("enc_roundtrip.xml");
        auto text_doc = serialize_annotated(doc);
        auto pos = text_doc.find("expect.Plain=\"text:attack");
        REQUIRE(pos != std::string::npos);
        text_doc.replace(pos, 26, "expect.Plain=\"text:defend");
        auto result = run_network(parse_model(text_doc));
        CHECK_FALSE(result.ok());
        REQUIRE(result.mismatches.size() == 1);
        CHECK(result.mismatches[0].rfind("sink.Plain: expected", 0) == 0);
    }

    TEST_CASE("two-party DH agrees with an independent computation") {
        auto doc = load_fixture("dh_two_party.xml");
        const boost::multiprecision::cpp_int m = (boost::multiprecision::cpp_int(1) << 127) - 1;
        std::set<Bytes> secrets;
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            auto result = run_network(doc, {.seed = seed});
            REQUIRE(result.ok());
            auto sa = result.env_received.at("Keystore_a.data").front();
            auto sb = result.env_received.at("Keystore_b.data").front();
            CHECK(sa == sb);
            SplitMix64 ra(seed ^ fnv1a64("rng_a"));
            SplitMix64 rb(seed ^ fnv1a64("rng_b"));
            auto xa = as_int(ra.bytes(16));
            auto xb = as_int(rb.bytes(16));
            CHECK(as_int(sa) == slow_pow(slow_pow(3, xa, m), xb, m));
            secrets.insert(sa);
        }
        CHECK(secrets.size() == 5);
    }

    TEST_CASE("traces are deterministic") {
        auto doc = load_fixture("dh_two_party.xml");
        auto a = format_trace(run_network(doc, {.seed = 3}).trace);
        auto b = format_trace(run_network(doc, {.seed = 3}).trace);
        CHECK(a == b);
        CHECK(a != format_trace(run_network(doc, {.seed = 4}).trace));
        CHECK(a.rfind("1 const_g_a.Const out ", 0) == 0);
    }

    TEST_CASE("step budget exhaustion is reported") {
        auto result = run_network(load_fixture("dh_two_party.xml"), {.seed = 1, .max_steps = 5});
        CHECK(result.budget_exhausted);
        CHECK(result.steps == 5);
        CHECK_FALSE(result.ok());
    }

    TEST_CASE("acyclic models quiesce within the step bound") {
        for (auto name : {"dh_two_party.xml", "enc_roundtrip.xml"}) {
            auto doc = load_fixture(name);
            auto result = run_network(doc);
            CHECK(result.steps <= doc.network.channels().size() + doc.network.instances().size());
        }
    }

    TEST_CASE("unbound env is an error") {
        auto doc = load_fixture("enc.xml");
        CHECK_THROWS_AS(run_network(doc), ExecutionError);
    }

    TEST_CASE("bindings") {
        CHECK(binding_from_config({{"mode", "fixture"}}).mode == EnvMode::fixture);
        CHECK(binding_from_config({{"mode", "server"}, {"port", "12001"}}).mode == EnvMode::tcp_server);
        auto client = tcp_binding({{"mode", "client"}, {"port", "9"}});
        CHECK(client.params.at("host") == "127.0.0.1");
        CHECK_THROWS_AS(binding_from_config({}), ExecutionError);
        CHECK_THROWS_AS(binding_from_config({{"mode", "pigeon"}}), ExecutionError);
        CHECK_THROWS_AS(tcp_binding({{"mode", "server"}, {"port", "70000"}}), ExecutionError);
        CHECK_THROWS_AS(tcp_binding({{"mode", "server"}, {"port", "http"}}), ExecutionError);
    }

    TEST_CASE("console binding") {
        auto doc = parse_model(R"(<model>
  <env id="in"><config mode="console"/><flow sarg="line" sink="t" darg="in"/></env>
  <transform id="t"><arg name="in"/><flow sarg="out" sink="out" darg="x"/></transform>
  <env id="out"><config mode="console"/><arg name="x"/></env>
</model>)");
        std::istringstream in("text:hey\n");
        std::ostringstream out;
        auto result = run_network(doc, {.console_in = &in, .console_out = &out});
        CHECK(result.ok());
        CHECK(out.str() == "out.x 686579\n");
    }

    TEST_CASE("file binding") {
        const std::string src = "/tmp/protopart_file_in_" + std::to_string(::getpid());
        const std::string dst = "/tmp/protopart_file_out_" + std::to_string(::getpid());
        {
            std::ofstream f(src, std::ios::binary);
            f << "raw bytes";
        }
        auto doc = parse_model("<model>\n  <env id=\"a\"><config mode=\"file\" read.d=\"" + src +
                               "\"/><flow sarg=\"d\" sink=\"b\" darg=\"d\"/></env>\n  <env id=\"b\"><config mode=\"file\" "
                               "write.d=\"" + dst + "\"/><arg name=\"d\"/></env>\n</model>");
        CHECK(run_network(doc).ok());
        CHECK(read_file(dst) == "raw bytes");
        std::remove(src.c_str());
        std::remove(dst.c_str());
    }

    TEST_CASE("framing") {
        CHECK(encode_frame(Bytes{}) == Bytes{0, 0, 0, 0});
        Bytes big(max_frame_size + 1);
        CHECK_THROWS_AS(encode_frame(big), TransportError);
    }

    TEST_CASE("tcp loopback echo including an empty frame") {
        const auto port = test_port(0);
        std::thread server([port] {
            auto conn = FramedConnection::accept_one(port, std::chrono::seconds(5));
            while (auto frame = conn.receive(std::chrono::seconds(5))) {
                conn.send(*frame);
            }
        });
        {
            auto conn = FramedConnection::connect("127.0.0.1", port, std::chrono::seconds(5));
            for (const auto& payload : {text("ping"), Bytes{}, Bytes(70000, 7)}) {
                conn.send(payload);
                auto back = conn.receive(std::chrono::seconds(5));
                REQUIRE(back.has_value());
                CHECK(*back == payload);
            }
        }
        server.join();
    }

    TEST_CASE("oversize incoming frame is rejected") {
        const auto port = test_port(1);
        std::thread server([port] {
            auto conn = FramedConnection::accept_one(port, std::chrono::seconds(5));
            CHECK_THROWS_AS(conn.receive(std::chrono::seconds(5)), TransportError);
        });
        {
            // header announcing 16 MiB + 1 bytes, written on a plain socket
            int fd = -1;
            for (int attempt = 0; attempt < 250; ++attempt) {
                fd = ::socket(AF_INET, SOCK_STREAM, 0);
                sockaddr_in addr{};
                addr.sin_family = AF_INET;
                addr.sin_port = htons(port);
                addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
                if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0) {
                    break;
                }
                ::close(fd);
                fd = -1;
                std::this_thread::sleep_for(std::chrono::milliseconds(20));
            }
            REQUIRE(fd >= 0);
            const std::uint8_t header[4] = {0x01, 0x00, 0x00, 0x01};
            CHECK(::write(fd, header, 4) == 4);
            server.join();
            ::close(fd);
        }
    }

    TEST_CASE("two DH parties over TCP") {
        auto doc = load_fixture("dh.xml");
        const auto port = test_port(2);
        auto bindings = [&](bool server) {
            RunOptions opts;
            opts.seed = server ? 1 : 2;
            std::map<std::string, std::string> net{{"mode", server ? "server" : "client"},
                                                   {"port", std::to_string(port)},
                                                   {"timeout_ms", "5000"}};
            opts.bindings["Network"] = tcp_binding(net);
            opts.bindings["Keystore"] = binding_from_config({{"mode", "fixture"}});
            return opts;
        };
        RunResult responder;
        std::thread t([&] { responder = run_network(doc, bindings(true)); });
        auto initiator = run_network(doc, bindings(false));
        t.join();
        REQUIRE(initiator.ok());
        REQUIRE(responder.ok());
        CHECK(initiator.env_received.at("Keystore.data") == responder.env_received.at("Keystore.data"));
        CHECK(initiator.env_received.at("Keystore.data").front().size() > 1);
    }
}
