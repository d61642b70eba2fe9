#include <tracegist/error.hpp>
#include <tracegist/trace.hpp>

#include <gtest/gtest.h>

using namespace tracegist;

TEST(TraceParse, CsvIntegerColumn) {
    Trace t = parse_trace("x\n1\n2\n3\n4\n", TraceFormat::Csv);
    ASSERT_EQ(t.schema.size(), 1u);
    EXPECT_EQ(t.schema.vars[0].name, "x");
    EXPECT_EQ(t.schema.vars[0].kind, VarKind::Integer);
    ASSERT_EQ(t.length(), 4u);
    for (int i = 0; i < 4; ++i) EXPECT_EQ(std::get<std::int64_t>(t.observations[i].values[0]), i + 1);
}

TEST(TraceParse, JsonlCategorical) {
    Trace t = parse_trace("{\"ev\":\"read\"}\n{\"ev\":\"reset\"}\n", TraceFormat::Jsonl);
    ASSERT_EQ(t.length(), 2u);
    EXPECT_EQ(t.schema.vars[0].kind, VarKind::Categorical);
    EXPECT_EQ(std::get<std::string>(t.observations[1].values[0]), "reset");
}

TEST(TraceParse, MixedColumnsAreCategoricalUnlessAllIntegers) {
    Trace t = parse_trace("q,ev\n0,read\n1,write\n-3,reset\n", TraceFormat::Csv);
    EXPECT_EQ(t.schema.vars[0].kind, VarKind::Integer);
    EXPECT_EQ(t.schema.vars[1].kind, VarKind::Categorical);
    Trace u = parse_trace("a\n1\nz\n", TraceFormat::Csv);
    EXPECT_EQ(u.schema.vars[0].kind, VarKind::Categorical);
}

TEST(TraceParse, SingleRowIsTooShort) {
    try {
        parse_trace("x\n1\n", TraceFormat::Csv);
        FAIL() << "expected an error";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::TooShort);
    }
}

TEST(TraceParse, EmptyInputIsParseError) {
    try {
        parse_trace("", TraceFormat::Csv);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Parse);
    }
}

TEST(TraceParse, RaggedRowReportsLine) {
    try {
        parse_trace("x,y\n1,2\n3\n4,5\n", TraceFormat::Csv);
        FAIL();
    } catch (const Error& e) {
        EXPECT_TRUE(e.kind() == ErrorKind::Parse || e.kind() == ErrorKind::Schema);
        EXPECT_EQ(e.line(), 3);
    }
}

TEST(TraceParse, JsonlKeyMismatchIsSchemaError) {
    try {
        parse_trace("{\"a\":1}\n{\"b\":2}\n", TraceFormat::Jsonl);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Schema);
        EXPECT_EQ(e.line(), 2);
    }
}

TEST(TraceParse, MalformedJsonReportsLine) {
    try {
        parse_trace("{\"a\":1}\n{\"a\":\n", TraceFormat::Jsonl);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Parse);
        EXPECT_EQ(e.line(), 2);
    }
}

TEST(TraceParse, RoundTripThroughWriter) {
    Trace t = parse_trace("q,ev\n0,read\n1,write\n", TraceFormat::Csv);
    for (auto f : {TraceFormat::Csv, TraceFormat::Jsonl}) {
        Trace u = parse_trace(write_trace(t, f), f);
        EXPECT_TRUE(u.schema == t.schema);
        EXPECT_EQ(u.observations, t.observations);
    }
}

TEST(Symbols, PairsConsecutiveObservations) {
    Trace t = parse_trace("x\n1\n2\n3\n4\n", TraceFormat::Csv);
    auto s = to_symbols(t);
    ASSERT_EQ(s.size(), 3u);
    for (std::size_t i = 0; i < s.size(); ++i) {
        EXPECT_EQ(std::get<std::int64_t>(s[i].current.values[0]), static_cast<std::int64_t>(i + 1));
        EXPECT_EQ(std::get<std::int64_t>(s[i].next.values[0]), static_cast<std::int64_t>(i + 2));
    }
}

TEST(Symbols, LengthTwoGivesOneSymbol) {
    EXPECT_EQ(to_symbols(parse_trace("x\n1\n2\n", TraceFormat::Csv)).size(), 1u);
}

TEST(Symbols, TwoVariableTraceIsLossless) {
    Trace t = parse_trace("x1,x2\n1,0\n2,0\n3,1\n2,0\n", TraceFormat::Csv);
    auto s = to_symbols(t);
    ASSERT_EQ(s.size(), t.length() - 1);
    for (std::size_t i = 0; i + 1 < s.size(); ++i) EXPECT_EQ(s[i].next, s[i + 1].current);
}
