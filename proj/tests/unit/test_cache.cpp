// test_cache.cpp — On-disk influence-functional cache: keys, round trips and invalidation

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "floquet_if/if_cache.hpp"
#include "floquet_if/operators.hpp"
#include "test_support.hpp"

using namespace floquet;
namespace fs = std::filesystem;

namespace {

class CacheTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("floquet_if_cache_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(dir_);
        request_.bath = floquet::testing::ohmic(0.1, 2.5);
        bath::FitOptions fo;
        fo.terms = 2;
        request_.fit = bath::fit_exponentials(request_.bath, fo);
        request_.coupling = ops::pauli_z();
        request_.dt = 0.05;
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path entry(const std::string& suffix) const { return dir_ / (cache::cache_key(request_) + suffix); }

    fs::path dir_;
    cache::IfRequest request_;
};

}  // namespace

TEST(CacheKeys, FnvReferenceValues) {
    EXPECT_EQ(cache::to_hex(cache::fnv1a("")), "cbf29ce484222325");
    EXPECT_EQ(cache::to_hex(cache::fnv1a("a")), "af63dc4c8601ec8c");
    EXPECT_EQ(cache::to_hex(cache::fnv1a("foobar")), "85944171f73967e8");
}

TEST_F(CacheTest, KeyDependsOnEveryInput) {
    const auto base = cache::cache_key(request_);
    auto r = request_;
    r.dt = 0.0500000001;
    EXPECT_NE(cache::cache_key(r), base);
    r = request_;
    r.pseudomodes.excitation_cap = 2;
    EXPECT_NE(cache::cache_key(r), base);
    r = request_;
    r.coupling = ops::pauli_x();
    EXPECT_NE(cache::cache_key(r), base);
    r = request_;
    r.fit.terms[0].rate += 1e-15;
    EXPECT_NE(cache::cache_key(r), base);
    EXPECT_EQ(cache::cache_key(request_), base);
}

TEST_F(CacheTest, RoundTripIsBitIdentical) {
    cache::IfCache c(dir_);
    bool hit = true;
    const auto built = c.get_or_build(request_, &hit);
    EXPECT_FALSE(hit);
    const auto again = c.get_or_build(request_, &hit);
    EXPECT_TRUE(hit);
    EXPECT_EQ(built->chi, again->chi);
    EXPECT_TRUE((built->q.array() == again->q.array()).all());
    EXPECT_TRUE((built->v_l.array() == again->v_l.array()).all());
    EXPECT_TRUE((built->v_r.array() == again->v_r.array()).all());
    EXPECT_EQ(built->mirror, again->mirror);
    EXPECT_TRUE(c.warnings().empty());

    auto other = request_;
    other.dt = 0.1;
    EXPECT_FALSE(c.lookup(other).has_value());
}

TEST_F(CacheTest, CorruptEntryIsRebuilt) {
    cache::IfCache c(dir_);
    const auto built = c.get_or_build(request_);
    {
        std::ofstream out(entry(".q.fift"), std::ios::binary | std::ios::trunc);
        out << "garbage";
    }
    EXPECT_FALSE(c.lookup(request_).has_value());
    ASSERT_EQ(c.warnings().size(), 1u);
    EXPECT_NE(c.warnings()[0].find("invalidated"), std::string::npos);
    EXPECT_FALSE(fs::exists(entry(".meta")));
    bool hit = true;
    const auto rebuilt = c.get_or_build(request_, &hit);
    EXPECT_FALSE(hit);
    EXPECT_TRUE((rebuilt->q.array() == built->q.array()).all());
}

TEST_F(CacheTest, MetadataMismatchInvalidates) {
    cache::IfCache c(dir_);
    c.get_or_build(request_);
    std::ifstream in(entry(".meta"));
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();
    const auto pos = text.find("fit_hash=");
    ASSERT_NE(pos, std::string::npos);
    text.replace(pos + 9, 4, "0000");
    std::ofstream(entry(".meta"), std::ios::trunc) << text;
    EXPECT_FALSE(c.lookup(request_).has_value());
    ASSERT_EQ(c.warnings().size(), 1u);
    EXPECT_NE(c.warnings()[0].find("fit hash"), std::string::npos);
}
