#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"
#include "qs/io.hpp"
#include "qs/service.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class ServiceTest : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        server_ = new httplib::Server;
        qs::service::install_routes(*server_, {"http://localhost:5173"});
        port_ = server_->bind_to_any_port("127.0.0.1");
        ASSERT_GT(port_, 0);
        thread_ = new std::thread([] { server_->listen_after_bind(); });
        server_->wait_until_ready();
    }

    static void TearDownTestSuite() {
        server_->stop();
        thread_->join();
        delete thread_;
        delete server_;
    }

    static httplib::Client client() {
        httplib::Client c("127.0.0.1", port_);
        c.set_read_timeout(30, 0);
        return c;
    }

    static httplib::Result post(const std::string& path, const json& body) {
        return client().Post(path, body.dump(), "application/json");
    }

    static inline httplib::Server* server_ = nullptr;
    static inline std::thread* thread_ = nullptr;
    static inline int port_ = 0;
};

const json kVolProblem = {
    {"grid", {{"lo", 0.2}, {"hi", 5.0}, {"n", 1001}, {"spacing", "log"}}},
    {"market", {{"family", "lognormal"}, {"params", {{"mu", 0.0}, {"sigma", 0.2}}}}},
    {"views", json::array({{{"type", "vol"}, {"target_sigma", 0.15}}})},
    {"risk", 2},
};

}  // namespace

TEST_F(ServiceTest, HealthReportsOk) {
    auto res = client().Get("/api/health");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 200);
    EXPECT_EQ(json::parse(res->body), (json{{"status", "ok"}}));
    EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "http://localhost:5173");
}

TEST_F(ServiceTest, PreflightIsAnswered) {
    auto res = client().Options("/api/design");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 204);
    EXPECT_NE(res->get_header_value("Access-Control-Allow-Methods").find("POST"), std::string::npos);
}

TEST_F(ServiceTest, DesignResponseShape) {
    auto res = post("/api/design", kVolProblem);
    ASSERT_TRUE(res);
    ASSERT_EQ(res->status, 200) << res->body;
    const auto j = json::parse(res->body);
    for (const char* key : {"x", "f", "F", "b", "m"}) {
        ASSERT_TRUE(j.contains(key)) << key;
        EXPECT_EQ(j.at(key).size(), 1001u) << key;
    }
    EXPECT_LE(std::abs(j.at("diagnostics").at("budget_residual").get<double>()), 1e-8);
}

TEST_F(ServiceTest, DesignMatchesCliBitForBit) {
    const fs::path dir = fs::temp_directory_path() / ("qs_service_parity_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    const std::string cmd = std::string(QS_CLI_PATH) + " design --market '" + kVolProblem.at("market").dump() +
                            "' --views '" + kVolProblem.at("views").dump() + "' --risk 2 --grid '" +
                            kVolProblem.at("grid").dump() + "' --out '" + dir.string() + "' >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    ASSERT_TRUE(WIFEXITED(status) && WEXITSTATUS(status) == 0);
    const auto payoff = qs::io::read_csv_file((dir / "payoff.csv").string());
    const auto believed = qs::io::read_csv_file((dir / "believed.csv").string());
    fs::remove_all(dir);

    auto res = post("/api/design", kVolProblem);
    ASSERT_TRUE(res);
    const auto j = json::parse(res->body);
    EXPECT_EQ(j.at("x").get<std::vector<double>>(), *payoff.find("x"));
    EXPECT_EQ(j.at("f").get<std::vector<double>>(), *payoff.find("f"));
    EXPECT_EQ(j.at("F").get<std::vector<double>>(), *payoff.find("F"));
    EXPECT_EQ(j.at("b").get<std::vector<double>>(), *believed.find("b"));
    EXPECT_EQ(j.at("m").get<std::vector<double>>(), *believed.find("m"));
}

TEST_F(ServiceTest, EmptyBodyDesignsTheBond) {
    auto res = post("/api/design", json::object());
    ASSERT_TRUE(res);
    ASSERT_EQ(res->status, 200);
    for (double v : json::parse(res->body).at("F").get<std::vector<double>>()) EXPECT_NEAR(v, 1.0, 1e-12);
}

TEST_F(ServiceTest, NegativeSigmaIsRejected) {
    json problem = kVolProblem;
    problem["market"]["params"]["sigma"] = -1;
    auto res = post("/api/design", problem);
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 400);
    EXPECT_EQ(json::parse(res->body).at("error"), "invalid-params");
}

TEST_F(ServiceTest, MalformedJsonIsConfigParse) {
    auto res = client().Post("/api/design", "{\"grid\":", "application/json");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 400);
    EXPECT_EQ(json::parse(res->body).at("error"), "config-parse");
}

TEST_F(ServiceTest, ImpliedInvertsDesign) {
    const auto design = json::parse(post("/api/design", kVolProblem)->body);
    auto res = post("/api/implied", {{"x", design.at("x")}, {"F", design.at("F")}, {"market", kVolProblem.at("market")},
                                     {"risk", 2}});
    ASSERT_TRUE(res);
    ASSERT_EQ(res->status, 200) << res->body;
    const auto b = json::parse(res->body).at("b").get<std::vector<double>>();
    EXPECT_LE(qs::testing::sup_norm_diff(b, design.at("b").get<std::vector<double>>()), 1e-6);
}

TEST_F(ServiceTest, ImpliedRejectsZeroPayoff) {
    const auto g = qs::make_grid(0.2, 5.0, 101, qs::Spacing::logarithmic);
    std::vector<double> x(g.points().begin(), g.points().end());
    std::vector<double> F(x.size(), 1.0);
    F[40] = 0.0;
    auto res = post("/api/implied", {{"x", x}, {"F", F}});
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 400);
    EXPECT_EQ(json::parse(res->body).at("error"), "nonpositive-payoff");
}

TEST_F(ServiceTest, ConcurrentRequestsAgree) {
    const std::string expected = post("/api/design", kVolProblem)->body;
    std::vector<std::string> bodies(8);
    std::vector<std::thread> workers;
    for (std::size_t k = 0; k < bodies.size(); ++k) {
        workers.emplace_back([&, k] {
            auto res = post("/api/design", kVolProblem);
            if (res) bodies[k] = res->body;
        });
    }
    for (auto& w : workers) w.join();
    for (const auto& b : bodies) EXPECT_EQ(b, expected);
}
