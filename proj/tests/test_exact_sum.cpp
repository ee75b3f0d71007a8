#include "ahlp/tracking/exact_sum.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace ahlp;

TEST( ExactSum, CancellationIsExact )
{
   ExactSum s;
   s.add( 1e20 );
   s.add( 1.0 );
   s.add( -1e20 );
   EXPECT_EQ( s.value(), 1.0 );
}

TEST( ExactSum, AddThenSubtractReturnsToZero )
{
   std::mt19937_64 rng( 3 );
   std::uniform_real_distribution<double> d( -1e6, 1e6 );
   std::vector<double> v( 1000 );
   ExactSum s;
   for( auto& x : v )
   {
      x = d( rng ) * std::ldexp( 1.0, int( rng() % 60 ) - 30 );
      s.add( x );
   }
   for( double x : v )
      s.subtract( x );
   EXPECT_TRUE( s.is_zero() );
   EXPECT_EQ( s, ExactSum{} );
}

TEST( ExactSum, OrderIndependent )
{
   std::vector<double> v{ 0.1, 1e-300, -3e10, 7.25, 1e300, -1e300, 0.3 };
   ExactSum a, b;
   for( double x : v )
      a.add( x );
   for( auto it = v.rbegin(); it != v.rend(); ++it )
      b.add( *it );
   EXPECT_EQ( a, b );
   EXPECT_EQ( a.value(), b.value() );
}

TEST( ExactSum, CorrectlyRoundedValue )
{
   ExactSum s;
   s.add( 1.0 );
   s.add( 0x1.0p-53 );
   s.add( 0x1.0p-80 );
   EXPECT_EQ( s.value(), 1.0 + 0x1.0p-52 );
   ExactSum t( -2.5 );
   EXPECT_TRUE( t.negative() );
   EXPECT_EQ( t.value(), -2.5 );
}
