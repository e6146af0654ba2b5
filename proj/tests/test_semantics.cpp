#include "oracles.hpp"

#include "dialnorm/error.hpp"
#include "dialnorm/geotasks/linreg.hpp"
#include "dialnorm/semantics/attribution.hpp"
#include "dialnorm/semantics/clustering.hpp"
#include "dialnorm/semantics/embedding.hpp"
#include "dialnorm/semantics/pca.hpp"
#include "dialnorm/semantics/plot.hpp"

#include <httplib.h>
#include <json.hpp>

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <map>
#include <set>
#include <thread>

using namespace dialnorm;
using namespace dialnorm::sem;
using testing::Gen;
using testing::blobs;
using testing::naive_average_linkage;
using testing::same_partition;

namespace {

double naive_silhouette(const Points& X, const std::vector<int>& labels) {
    const auto n = static_cast<int>(X.rows());
    double total = 0;
    for (int i = 0; i < n; ++i) {
        std::map<int, std::pair<double, int>> by;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            auto& e = by[labels[static_cast<std::size_t>(j)]];
            e.first += (X.row(i) - X.row(j)).norm();
            ++e.second;
        }
        const int own = labels[static_cast<std::size_t>(i)];
        if (!by.count(own)) continue;
        const double a = by[own].first / by[own].second;
        double b = std::numeric_limits<double>::infinity();
        for (const auto& [l, e] : by)
            if (l != own) b = std::min(b, e.first / e.second);
        total += (b - a) / std::max(a, b);
    }
    return total / n;
}

}  // namespace

TEST_CASE("two blobs are recovered exactly by k-means and agglomerative clustering") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Gen g(seed);
        const int a = g.integer(3, 15), b = g.integer(3, 15);
        const Points X = blobs(g, a, b, g.integer(2, 8));
        std::vector<int> truth(static_cast<std::size_t>(a), 0);
        truth.resize(static_cast<std::size_t>(a + b), 1);
        const auto km = kmeans(X, 2, seed);
        CHECK(km.labels == truth);
        CHECK(km.k == 2);
        const auto ag = agglomerative(X, 2);
        CHECK(ag.labels == truth);
        CHECK(ag.merges.size() == static_cast<std::size_t>(a + b - 1));
        const auto db = dbscan(X, 8.0, 2);
        CHECK(db.labels == truth);
    }
}

TEST_CASE("property: k-means inertia trace is monotone and final inertia is exact") {
    Gen g(3);
    for (int trial = 0; trial < 30; ++trial) {
        const Points X = g.matrix(g.integer(5, 40), g.integer(1, 6), -5, 5);
        const int k = g.integer(1, std::min<int>(6, static_cast<int>(X.rows())));
        const auto r = kmeans(X, k, static_cast<std::uint64_t>(trial));
        for (std::size_t i = 1; i < r.inertia_trace.size(); ++i) CHECK(r.inertia_trace[i] <= r.inertia_trace[i - 1] + 1e-9);
        std::vector<Eigen::RowVectorXd> centroid(static_cast<std::size_t>(r.k), Eigen::RowVectorXd::Zero(X.cols()));
        std::vector<int> count(static_cast<std::size_t>(r.k), 0);
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            centroid[static_cast<std::size_t>(r.labels[static_cast<std::size_t>(i)])] += X.row(i);
            ++count[static_cast<std::size_t>(r.labels[static_cast<std::size_t>(i)])];
        }
        double inertia = 0;
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            const auto l = static_cast<std::size_t>(r.labels[static_cast<std::size_t>(i)]);
            inertia += (X.row(i) - centroid[l] / count[l]).squaredNorm();
        }
        CHECK(r.inertia == doctest::Approx(inertia).epsilon(1e-9));
        CHECK(kmeans(X, k, static_cast<std::uint64_t>(trial)).labels == r.labels);
    }
    CHECK_THROWS_AS(kmeans(Points::Zero(3, 2), 4, 0), ConfigError);
    CHECK_THROWS_AS(kmeans(Points::Zero(3, 2), 0, 0), ConfigError);
}

TEST_CASE("property: agglomerative clustering matches a naive average-linkage oracle") {
    Gen g(14);
    for (int trial = 0; trial < 30; ++trial) {
        const Points X = g.matrix(g.integer(3, 18), g.integer(1, 5), -3, 3);
        const int k = g.integer(1, static_cast<int>(X.rows()));
        std::vector<int> want, unused;
        naive_average_linkage(X, k, want);
        const auto heights = naive_average_linkage(X, 1, unused);
        const auto got = agglomerative(X, k);
        CHECK(same_partition(got.labels, want));
        REQUIRE(got.merges.size() == heights.size());
        for (std::size_t m = 0; m < heights.size(); ++m) CHECK(got.merges[m].distance == doctest::Approx(heights[m]).epsilon(1e-12));
    }
}

TEST_CASE("property: silhouette matches a naive computation") {
    Gen g(15);
    for (int trial = 0; trial < 30; ++trial) {
        const Points X = g.matrix(g.integer(4, 25), 3, -3, 3);
        std::vector<int> labels(static_cast<std::size_t>(X.rows()));
        for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(i % 3);
        CHECK(silhouette_score(X, labels) == doctest::Approx(naive_silhouette(X, labels)).epsilon(1e-12));
    }
}

TEST_CASE("silhouette scan prefers k=2 on two blobs") {
    Gen g(4);
    const Points X = blobs(g, 8, 9, 4);
    const auto scan = silhouette_scan(X, 2, 6, 7);
    CHECK(scan.ks == std::vector<int>{2, 3, 4, 5, 6});
    CHECK(scan.best_k == 2);
    CHECK_THROWS_AS(silhouette_scan(X, 1, 4, 0), ConfigError);
}

TEST_CASE("DBSCAN noise and k-distance") {
    Points X(6, 1);
    X << 0, 0.5, 1, 10, 10.4, 50;
    const auto r = dbscan(X, 0.6, 2);
    CHECK(r.labels == std::vector<int>{0, 0, 0, 1, 1, kNoise});
    CHECK(r.k == 2);
    const auto kd = kdistance(X, 1);
    CHECK(kd.front() == doctest::Approx(39.6));
    CHECK(std::is_sorted(kd.rbegin(), kd.rend()));
}

TEST_CASE("property: PCA components are orthonormal and eigenvalues match a dense solver") {
    Gen g(16);
    for (int trial = 0; trial < 40; ++trial) {
        const int d = g.integer(2, 16);
        const Points X = g.matrix(g.integer(3, 30), d, -4, 4);
        const auto p = pca2(X);
        const Eigen::Matrix2d gram = p.components.transpose() * p.components;
        CHECK((gram - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() <= 1e-10);
        const Eigen::MatrixXd C = X.rowwise() - X.colwise().mean();
        const Eigen::MatrixXd cov = C.transpose() * C / static_cast<double>(X.rows() - 1);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
        const Eigen::VectorXd ev = es.eigenvalues().reverse();
        CHECK(p.explained_variance(0) == doctest::Approx(ev(0)).epsilon(1e-10));
        CHECK(p.explained_variance(1) == doctest::Approx(ev(1)).epsilon(1e-10));
        CHECK(p.explained_ratio(0) == doctest::Approx(ev(0) / ev.sum()).epsilon(1e-10));
        CHECK((p.projection - C * p.components).norm() <= 1e-9);
        for (int c = 0; c < 2; ++c) {
            Eigen::Index arg;
            p.components.col(c).cwiseAbs().maxCoeff(&arg);
            CHECK(p.components(arg, c) > 0);
        }

        const auto je = jacobi_eigen(cov);
        CHECK((je.values - ev).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, ev(0)));
        CHECK((je.vectors.transpose() * je.vectors - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() <= 1e-10);
    }
    CHECK_THROWS_AS(pca2(Points::Zero(2, 3)), ValidationError);
    CHECK_THROWS_AS(pca2(Points::Ones(4, 3)), DegenerateError);
}

TEST_CASE("erase_token removes one adjacent whitespace run") {
    const std::string s = "ένα  δύο τρία";
    const auto toks = unicode::tokenize(s);
    REQUIRE(toks.size() == 3);
    CHECK(erase_token(s, toks[0]) == "δύο τρία");
    CHECK(erase_token(s, toks[1]) == "ένα  τρία");
    CHECK(erase_token(s, toks[2]) == "ένα  δύο");
    CHECK(erase_token("μόνο", unicode::tokenize("μόνο")[0]).empty());
}

TEST_CASE("attribution on a linear count model equals minus the coefficient") {
    Gen g(17);
    std::vector<std::string> texts;
    for (int i = 0; i < 60; ++i) texts.push_back(testing::random_sentence(g, 2, 8));
    std::map<std::string, int> vocab;
    for (const auto& t : texts)
        for (const auto& tok : unicode::tokenize(t)) vocab.emplace(tok.text, static_cast<int>(vocab.size()));
    auto counts = [&](const std::vector<std::string>& batch) {
        std::vector<Eigen::Triplet<double>> trips;
        for (std::size_t r = 0; r < batch.size(); ++r)
            for (const auto& tok : unicode::tokenize(batch[r]))
                if (auto it = vocab.find(tok.text); it != vocab.end()) trips.emplace_back(static_cast<int>(r), it->second, 1.0);
        geo::FeatureMatrix X(static_cast<Eigen::Index>(batch.size()), static_cast<Eigen::Index>(vocab.size()));
        X.setFromTriplets(trips.begin(), trips.end());
        return X;
    };
    geo::Targets Y(60, 2);
    for (int i = 0; i < 60; ++i) Y.row(i) << g.uniform(35, 41), g.uniform(20, 30);
    geo::LinearRegression reg(geo::RidgeOptions{.l2 = 0.1});
    reg.fit(counts(texts), Y);
    const auto report = erase_and_attribute(texts, [&](const std::vector<std::string>& batch) { return reg.predict(counts(batch)); });
    REQUIRE(report.tokens.size() == vocab.size());
    int total = 0;
    for (const auto& t : report.tokens) {
        const int j = vocab.at(t.token);
        CHECK(std::abs(t.mean_dlat + reg.solution().coef(j, 0)) <= 1e-9);
        CHECK(std::abs(t.mean_dlon + reg.solution().coef(j, 1)) <= 1e-9);
        total += t.count;
    }
    int occurrences = 0;
    for (const auto& t : texts) occurrences += static_cast<int>(unicode::tokenize(t).size());
    CHECK(total == occurrences);
    for (std::size_t i = 1; i < report.north.size(); ++i) CHECK(report.north[i - 1].north() >= report.north[i].north());
    for (std::size_t i = 1; i < report.west.size(); ++i) CHECK(report.west[i - 1].east() <= report.west[i].east());
    CHECK(report.north.front().token == report.south.back().token);

    const auto only = erase_and_attribute(texts, [&](const std::vector<std::string>& b) { return reg.predict(counts(b)); },
                                          [](const std::string& tok) { return tok == "ου"; });
    REQUIRE(only.tokens.size() == 1);
    CHECK(only.tokens[0].token == "ου");
}

TEST_CASE("hashed bag of words and region vectors") {
    HashedBowProvider bow(16);
    const auto tv = bow.embed_tokens("ο λύκος ο");
    REQUIRE(tv.size() == 3);
    CHECK(tv[0].vector.sum() == 1.0);
    CHECK(tv[0].vector(bow.bucket_of("ο")) == 1.0);
    CHECK(tv[0].vector == tv[2].vector);
    CHECK(bow.bucket_of("λύκος") == static_cast<int>(fnv1a64("λύκος") % 16));
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);

    Gen g(18);
    std::vector<std::pair<std::string, std::string>> rows;
    for (int i = 0; i < 50; ++i) rows.emplace_back(testing::random_sentence(g), i % 3 ? "Crete" : "Lesbos");
    const auto c = testing::make_corpus(rows);
    const auto serial = region_vectors(c, bow, 1);
    const auto parallel = region_vectors(c, bow, 8);
    REQUIRE(serial.size() == 2);
    CHECK(serial[0].region == "Crete");
    CHECK(serial[1].n_proverbs == 17);
    for (std::size_t r = 0; r < 2; ++r) CHECK(serial[r].vector == parallel[r].vector);

    Eigen::VectorXd expect = Eigen::VectorXd::Zero(16);
    int n = 0;
    for (const auto& rec : c) {
        if (rec.region.name != "Lesbos") continue;
        Eigen::VectorXd pv = Eigen::VectorXd::Zero(16);
        const auto toks = bow.embed_tokens(rec.text);
        for (const auto& t : toks) pv += t.vector;
        expect += pv / static_cast<double>(toks.size());
        ++n;
    }
    CHECK((serial[1].vector - expect / n).norm() <= 1e-12);
    CHECK(stack_rows(serial).rows() == 2);
}

TEST_CASE("HTTP embedding provider") {
    httplib::Server server;
    std::atomic<int> calls{0};
    server.Post("/embed", [&](const httplib::Request& req, httplib::Response& res) {
        ++calls;
        const auto text = nlohmann::json::parse(req.body)["text"].get<std::string>();
        nlohmann::json out{{"tokens", nlohmann::json::array()}, {"vectors", nlohmann::json::array()}};
        for (const auto& tok : unicode::tokenize(text)) {
            out["tokens"].push_back(tok.text);
            out["vectors"].push_back({static_cast<double>(tok.text.size()), 1.0, 0.0});
        }
        if (text == "λάθος") out["vectors"] = nlohmann::json::array();
        res.set_content(out.dump(), "application/json");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread th([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    HttpEmbeddingProvider p("http://127.0.0.1:" + std::to_string(port) + "/embed", 3);
    const auto a = p.embed_tokens("ένα δύο");
    REQUIRE(a.size() == 2);
    CHECK(a[1].token == "δύο");
    CHECK(a[1].vector(0) == 6.0);
    p.embed_tokens("ένα δύο");
    CHECK(calls == 1);
    CHECK_THROWS_AS(p.embed_tokens("λάθος"), ContentError);
    HttpEmbeddingProvider wrong_dim("http://127.0.0.1:" + std::to_string(port) + "/embed", 4);
    CHECK_THROWS_AS(wrong_dim.embed_tokens("ένα"), ContentError);

    server.stop();
    th.join();
}

TEST_CASE("svg plots") {
    Eigen::Matrix<double, Eigen::Dynamic, 2> pts(3, 2);
    pts << 0, 0, 1, 2, -1, 0.5;
    const auto svg = scatter_svg(pts, {"Κρήτη", "Λέσβος", "A&B"}, {0, 1, kNoise}, "τίτλος");
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    std::size_t circles = 0;
    for (auto pos = svg.find("<circle"); pos != std::string::npos; pos = svg.find("<circle", pos + 1)) ++circles;
    CHECK(circles == 3);
    CHECK(svg.find("A&amp;B") != std::string::npos);
    const auto line = line_svg({2, 3, 4}, {0.5, 0.2, 0.1}, "k", "silhouette");
    CHECK(line.find("<polyline") != std::string::npos);
}
