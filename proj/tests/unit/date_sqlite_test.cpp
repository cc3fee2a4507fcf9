#include <gtest/gtest.h>

#include <random>

#include "cohortc/date.hpp"
#include "cohortc/sqlite.hpp"

namespace {

using namespace cohortc;
using namespace std::chrono;

TEST(Date, Parse) {
    EXPECT_TRUE(date::parse_date("2020-02-29"));
    EXPECT_FALSE(date::parse_date("2021-02-29"));
    EXPECT_FALSE(date::parse_date("2021-2-3"));
    EXPECT_FALSE(date::parse_date("2021-02-03 "));
    EXPECT_EQ(date::format_date(*date::parse_date("2021-02-03")), "2021-02-03");
    EXPECT_EQ(date::minus_years(*date::parse_date("2020-02-29"), 1), *date::parse_date("2019-02-28"));
    EXPECT_EQ(date::end_of_day(*date::parse_date("2020-12-31")), "2020-12-31 23:59:59");
}

TEST(Date, Timestamps) {
    EXPECT_EQ(date::parse_timestamp_minutes("1970-01-01 00:00"), 0);
    EXPECT_EQ(date::parse_timestamp_minutes("1970-01-02 01:30:59"), 1440 + 90);
    EXPECT_FALSE(date::parse_timestamp_minutes("1970-01-02"));
    EXPECT_FALSE(date::parse_timestamp_minutes("1970-01-02 25:00"));
    std::mt19937_64 rng(8);
    for (int i = 0; i < 1000; ++i) {
        const std::int64_t m = static_cast<std::int64_t>(rng() % 40'000'000);
        ASSERT_EQ(date::parse_timestamp_minutes(date::format_timestamp_minutes(m)), m);
    }
}

// Counts birthdays one year at a time.
int naive_age(const date::Date& birth, const date::Date& ref) {
    int age = -1;
    for (int y = static_cast<int>(birth.year()); y <= static_cast<int>(ref.year()); ++y) {
        auto d = year{y} / birth.month() / birth.day();
        if (!d.ok()) d = year{y} / February / 28;
        if (sys_days{d} <= sys_days{ref}) ++age;
    }
    return age;
}

TEST(Date, AgeMatchesNaiveCount) {
    std::mt19937_64 rng(9);
    const auto lo = sys_days{year{1920} / January / 1}.time_since_epoch().count();
    for (int i = 0; i < 2000; ++i) {
        const date::Date birth{sys_days{days{lo + static_cast<int>(rng() % 36000)}}};
        const date::Date ref{sys_days{birth} + days{static_cast<int>(rng() % 40000)}};
        ASSERT_EQ(date::age_at(birth, ref), naive_age(birth, ref))
            << date::format_date(birth) << " " << date::format_date(ref);
    }
}

TEST(Sqlite, ExecAndQuery) {
    sql::Database db;
    db.exec("CREATE TABLE t (id INTEGER, v REAL, s TEXT); INSERT INTO t VALUES (3, 1.5, 'a'), (1, NULL, 'b'), (3, 2, 'c');");
    EXPECT_EQ(db.person_ids("SELECT id FROM t"), (std::set<std::int64_t>{1, 3}));
    auto st = db.prepare("SELECT v, s FROM t WHERE id = ? ORDER BY s");
    st.bind(1, std::int64_t{1});
    ASSERT_TRUE(st.step());
    EXPECT_FALSE(st.column_double(0).has_value());
    EXPECT_EQ(st.column_text(1), "b");
    EXPECT_FALSE(st.step());
    EXPECT_THROW(db.exec("SELEC nonsense"), sql::SqliteError);
    EXPECT_THROW(db.person_ids("SELECT id FROM missing"), sql::SqliteError);
}

TEST(Sqlite, TimestampTextOrdering) {
    sql::Database db;
    db.exec("CREATE TABLE e (id INTEGER, t TEXT); INSERT INTO e VALUES (1, '2020-12-31 23:59:00'), (2, '2021-01-01 00:00:00');");
    EXPECT_EQ(db.person_ids("SELECT id FROM e WHERE t <= '2020-12-31 23:59:59'"), (std::set<std::int64_t>{1}));
    EXPECT_EQ(db.person_ids("SELECT id FROM e WHERE t <= datetime('2020-12-31 20:00:00', '+240 minutes')"),
              (std::set<std::int64_t>{1, 2}));
}

}  // namespace
