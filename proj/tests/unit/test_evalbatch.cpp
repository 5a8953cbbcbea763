#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "mrct/error.hpp"
#include "mrct/evalbatch.hpp"

using namespace mrct;
using namespace mrct::eval;

namespace {

PairResult result(const std::string& model, Direction d, const std::string& gen, double psnr,
                  double ssim = 0.5, double uqi = 0.1, double vif = 0.02) {
    PairRecord r;
    r.model_id = model;
    r.direction = d;
    r.generated_path = gen;
    r.reference_path = "ref/" + gen;
    return {r, {psnr, ssim, uqi, vif}};
}

std::string golden(const std::string& name) {
    return fixtures::read_file(std::filesystem::path(MRCT_TEST_DATA_DIR) / name);
}

}  // namespace

TEST(EvaluatePair, IdentityAndOffset) {
    fixtures::TempDir dir;
    const auto ref = fixtures::texture(32, 32, 3);
    std::vector<double> plus5(ref.pixels().begin(), ref.pixels().end());
    for (auto& p : plus5) p += 5;
    save_png(ref, dir / "ref.png");
    save_png(ref, dir / "same.png");
    save_png(ImagePlane(32, 32, plus5), dir / "plus5.png");

    PairRecord r{"m", std::nullopt, Direction::MR2CT, "same.png", "ref.png", std::nullopt};
    auto out = evaluate_pair(r, {}, dir.path());
    ASSERT_TRUE(std::holds_alternative<PairResult>(out));
    const auto& m = std::get<PairResult>(out).metrics;
    EXPECT_TRUE(std::isinf(*m.psnr_db));
    EXPECT_NEAR(*m.ssim, 1.0, 1e-12);
    EXPECT_NEAR(*m.uqi, 1.0, 1e-12);
    EXPECT_NEAR(*m.vif, 1.0, 1e-6);

    r.generated_path = "plus5.png";
    out = evaluate_pair(r, {}, dir.path());
    ASSERT_TRUE(std::holds_alternative<PairResult>(out));
    EXPECT_NEAR(*std::get<PairResult>(out).metrics.psnr_db, 34.1514, 1e-3);
}

TEST(EvaluateManifest, ErrorsDoNotAbort) {
    fixtures::TempDir dir;
    const auto ref = fixtures::texture(32, 32, 3);
    save_png(ref, dir / "ref.png");
    save_png(fixtures::noisy(ref, 4, 1), dir / "g.png");
    save_png(fixtures::texture(16, 32, 3), dir / "narrow.png");
    fixtures::write_file(dir / "m.csv",
                         "model_id,category,direction,generated_path,reference_path\n"
                         "a,,MR2CT,g.png,ref.png\n"
                         "a,,MR2CT,missing.png,ref.png\n"
                         "a,,CT2MR,narrow.png,ref.png\n");
    const auto batch = evaluate_manifest(load_manifest(dir / "m.csv"), {});
    ASSERT_EQ(batch.results.size(), 1u);
    ASSERT_EQ(batch.errors.size(), 2u);
    EXPECT_EQ(batch.errors[0].record.generated_path, "missing.png");
    EXPECT_NE(batch.errors[1].message.find("dimension mismatch"), std::string::npos);
}

TEST(Summarize, SampleStd) {
    const auto s = summarize({30, 32});
    EXPECT_DOUBLE_EQ(s.avg, 31.0);
    EXPECT_NEAR(s.std, std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(s.std, 1.41421, 1e-5);
    const auto one = summarize({7.5});
    EXPECT_EQ(one.avg, 7.5);
    EXPECT_EQ(one.std, 0.0);
    EXPECT_EQ(one.n, 1u);
    EXPECT_THROW(summarize({}), Error);
}

TEST(Aggregate, GroupsAndInfinity) {
    std::vector<PairResult> rs = {
        result("b", Direction::MR2CT, "1", 30),
        result("a", Direction::CT2MR, "1", 20),
        result("b", Direction::MR2CT, "2", 32),
        result("b", Direction::MR2CT, "3", std::numeric_limits<double>::infinity()),
    };
    const auto rows = aggregate(rs);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].model_id, "a");
    EXPECT_EQ(rows[1].model_id, "b");
    EXPECT_EQ(rows[1].n_pairs, 3u);
    EXPECT_EQ(rows[1].psnr_infinite, 1u);
    EXPECT_EQ(rows[1].psnr->n, 2u);
    EXPECT_DOUBLE_EQ(rows[1].psnr->avg, 31.0);
    EXPECT_EQ(rows[1].ssim->n, 3u);
}

TEST(Aggregate, PermutationInvariant) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(20, 40);
    std::vector<PairResult> rs;
    for (int i = 0; i < 60; ++i)
        rs.push_back(result("m" + std::to_string(i % 4), i % 3 ? Direction::MR2CT : Direction::CT2MR,
                            "g" + std::to_string(i), u(rng), u(rng) / 40, u(rng) / 80, u(rng) / 400));
    const auto base = aggregate(rs);
    for (int trial = 0; trial < 5; ++trial) {
        std::shuffle(rs.begin(), rs.end(), rng);
        EXPECT_EQ(aggregate(rs), base);
    }
}

TEST(Rank, DonorTables) {
    std::vector<AggregateRow> rows;
    for (const auto& d : fixtures::donor_psnr()) {
        rows.push_back({d.model, Direction::MR2CT, 1, Stat{d.mr2ct, 0, 1}, {}, {}, {}, 0});
        rows.push_back({d.model, Direction::CT2MR, 1, Stat{d.ct2mr, 0, 1}, {}, {}, {}, 0});
    }
    EXPECT_EQ(rank_models(rows, "psnr", Direction::MR2CT).front(), "iphone2dslr_flower");
    EXPECT_EQ(rank_models(rows, "psnr", Direction::CT2MR).front(), "iphone2dslr_flower");
    EXPECT_EQ(rank_models(rows, "psnr", Direction::MR2CT).size(), 18u);
}

TEST(Rank, TiesAndMissing) {
    std::vector<AggregateRow> rows = {
        {"zeta", Direction::MR2CT, 1, Stat{30, 0, 1}, {}, {}, {}, 0},
        {"alpha", Direction::MR2CT, 1, Stat{30, 0, 1}, {}, {}, {}, 0},
        {"none", Direction::MR2CT, 1, std::nullopt, {}, {}, {}, 1},
        {"best", Direction::MR2CT, 1, Stat{31, 0, 1}, {}, {}, {}, 0},
    };
    EXPECT_EQ(rank_models(rows, "psnr", Direction::MR2CT),
              (std::vector<std::string>{"best", "alpha", "zeta", "none"}));
    EXPECT_THROW(rank_models(rows, "lpips", Direction::MR2CT), Error);
}

TEST(Report, MarkdownGolden) {
    const auto rows = aggregate({result("m", Direction::MR2CT, "1", 30, 0.5, 0.1, 0.02),
                                 result("m", Direction::MR2CT, "2", 32, 0.7, 0.3, 0.04)});
    EXPECT_EQ(render_report(rows, ReportFormat::Markdown), golden("report_one_row.md"));
}

TEST(Report, InfiniteFooter) {
    const auto rows = aggregate({result("m", Direction::CT2MR, "1", 30),
                                 result("m", Direction::CT2MR, "2", std::numeric_limits<double>::infinity())});
    const auto md = render_report(rows, ReportFormat::Markdown);
    EXPECT_NE(md.find("## CT2MR"), std::string::npos);
    EXPECT_NE(md.find("infinite PSNR: m (1)"), std::string::npos);
}

TEST(Report, CsvAndJson) {
    std::vector<PairResult> rs;
    for (int i = 0; i < 9; ++i)
        rs.push_back(result("m" + std::to_string(i % 3), i % 2 ? Direction::MR2CT : Direction::CT2MR,
                            std::to_string(i), 25 + i * 0.37, 0.1 * i, 0.01 * i, 0.001 * i));
    const auto rows = aggregate(rs);
    const auto csv_text = render_report(rows, ReportFormat::Csv);
    EXPECT_EQ(static_cast<std::size_t>(std::count(csv_text.begin(), csv_text.end(), '\n')), rows.size() + 1);
    EXPECT_EQ(parse_report_json(render_report(rows, ReportFormat::Json)), rows);
    EXPECT_THROW(render_report({}, ReportFormat::Csv), Error);
}

TEST(Results, RoundTrip) {
    BatchResults b;
    b.results.push_back(result("m", Direction::MR2CT, "1", std::numeric_limits<double>::infinity()));
    b.results.push_back(result("m", Direction::MR2CT, "2", 31.123456789012345));
    b.results[1].metrics.vif.reset();
    b.errors.push_back({b.results[0].record, "image: cannot open 'x'"});
    const auto text = serialize_results(b);
    const auto back = parse_results(text);
    ASSERT_EQ(back.results.size(), 2u);
    EXPECT_EQ(back.results[0].metrics, b.results[0].metrics);
    EXPECT_EQ(back.results[1].metrics, b.results[1].metrics);
    EXPECT_EQ(back.results[1].record, b.results[1].record);
    EXPECT_EQ(back.errors[0].message, b.errors[0].message);
    EXPECT_EQ(serialize_results(back), text);
    EXPECT_THROW(parse_results("{}"), Error);
    EXPECT_THROW(parse_results("not json"), Error);
}
