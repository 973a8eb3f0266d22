#include "ioaware/constraint.hpp"

#include <gtest/gtest.h>

using namespace ioaware;

TEST(ConstraintSpec, ParsesStaticValue) {
   auto c = ConstraintSpec::parse("20");
   ASSERT_TRUE(c.is_static());
   EXPECT_EQ(c.static_value(), 20);
   EXPECT_FALSE(c.is_auto());
}

TEST(ConstraintSpec, ParsesUnboundedAuto) {
   auto c = ConstraintSpec::parse(" auto ");
   EXPECT_TRUE(c.is_auto());
   EXPECT_FALSE(c.is_bounded());
   EXPECT_EQ(c.to_string(), "auto");
}

TEST(ConstraintSpec, ParsesBoundedAuto) {
   auto c = ConstraintSpec::parse("auto(2, 256, 2)");
   ASSERT_TRUE(c.is_bounded());
   EXPECT_EQ(c.bounds().min, 2);
   EXPECT_EQ(c.bounds().max, 256);
   EXPECT_EQ(c.bounds().delta, 2);
   EXPECT_EQ(c.to_string(), "auto(2,256,2)");
}

TEST(ConstraintSpec, RoundTripsThroughText) {
   for (const char* text : {"1", "450", "auto", "auto(4,64,4)"}) {
      auto c = ConstraintSpec::parse(text);
      EXPECT_EQ(ConstraintSpec::parse(c.to_string()), c) << text;
   }
}

TEST(ConstraintSpec, RejectsNonPositiveStatic) {
   EXPECT_THROW(ConstraintSpec::fixed(0), WorkloadError);
   EXPECT_THROW(ConstraintSpec::parse("-5"), WorkloadError);
}

TEST(ConstraintSpec, RejectsBadBounds) {
   EXPECT_THROW(ConstraintSpec::bounded(0, 8, 2), WorkloadError);
   EXPECT_THROW(ConstraintSpec::bounded(16, 8, 2), WorkloadError);
   EXPECT_THROW(ConstraintSpec::bounded(2, 8, 1), WorkloadError);
}

TEST(ConstraintSpec, RejectsMalformedText) {
   for (const char* text : {"", "fast", "auto(", "auto(2,4)", "auto(2,4,2,2)", "auto(a,4,2)", "12x", "2.5"})
      EXPECT_THROW(ConstraintSpec::parse(text), WorkloadError) << text;
}

TEST(ConstraintSpec, MinEqualMaxIsAccepted) {
   auto c = ConstraintSpec::bounded(8, 8, 2);
   EXPECT_EQ(c.bounds().min, c.bounds().max);
}
