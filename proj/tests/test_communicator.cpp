#include "ahlp/comm/communicator.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <mutex>
#include <random>

using namespace ahlp;

class CommModes : public ::testing::TestWithParam<ExecMode>
{
};

TEST_P( CommModes, AllreduceSum )
{
   std::vector<std::vector<int>> got( 3 );
   run_ranks( 3, GetParam(), [&]( Communicator& c ) {
      got[c.rank()] = c.allreduce( std::vector<int>{ c.rank() + 1 }, ops::sum<int>() );
   } );
   for( const auto& g : got )
      EXPECT_EQ( g, std::vector<int>{ 6 } );
}

TEST_P( CommModes, AllreduceLogicalAnd )
{
   std::vector<std::vector<std::uint8_t>> got( 2 );
   run_ranks( 2, GetParam(), [&]( Communicator& c ) {
      std::vector<std::uint8_t> v = c.rank() == 0 ? std::vector<std::uint8_t>{ 1, 0 } : std::vector<std::uint8_t>{ 1, 1 };
      got[c.rank()] = c.allreduce( v, ops::logical_and() );
   } );
   for( const auto& g : got )
      EXPECT_EQ( g, ( std::vector<std::uint8_t>{ 1, 0 } ) );
}

TEST_P( CommModes, WrappingAddIndependentOfRankOrder )
{
   std::mt19937_64 rng( 11 );
   std::vector<std::uint64_t> words( 4 );
   for( auto& w : words )
      w = rng();
   std::uint64_t expect = 0;
   for( auto w : words )
      expect += w;
   std::vector<int> perm{ 0, 1, 2, 3 };
   do
   {
      std::vector<std::uint64_t> got( 4 );
      run_ranks( 4, GetParam(), [&]( Communicator& c ) {
         got[c.rank()] = c.allreduce( words[perm[c.rank()]], ops::wrapping_add() );
      } );
      for( auto g : got )
         EXPECT_EQ( g, expect );
   } while( std::next_permutation( perm.begin(), perm.end() ) );
}

TEST_P( CommModes, AllgatherConcatenatesInRankOrder )
{
   std::vector<std::vector<std::string>> got( 2 );
   run_ranks( 2, GetParam(), [&]( Communicator& c ) {
      std::vector<std::string> mine = c.rank() == 0 ? std::vector<std::string>{ "a" } : std::vector<std::string>{ "b", "c" };
      got[c.rank()] = c.allgather( mine );
   } );
   for( const auto& g : got )
      EXPECT_EQ( g, ( std::vector<std::string>{ "a", "b", "c" } ) );
}

TEST_P( CommModes, AllgatherEmpty )
{
   run_ranks( 3, GetParam(), [&]( Communicator& c ) { EXPECT_TRUE( c.allgather( std::vector<int>{} ).empty() ); } );
}

TEST_P( CommModes, AllgatherRandomPayloads )
{
   std::mt19937 rng( 5 );
   std::vector<std::vector<double>> parts( 5 );
   std::vector<double> expect;
   for( auto& p : parts )
   {
      p.resize( rng() % 7 );
      for( auto& v : p )
         v = rng() * 0.5;
      expect.insert( expect.end(), p.begin(), p.end() );
   }
   run_ranks( 5, GetParam(), [&]( Communicator& c ) { EXPECT_EQ( c.allgather( parts[c.rank()] ), expect ); } );
}

TEST_P( CommModes, BarrierAllReturn )
{
   std::atomic<int> n{ 0 };
   run_ranks( 4, GetParam(), [&]( Communicator& c ) {
      c.barrier();
      ++n;
   } );
   EXPECT_EQ( n.load(), 4 );
}

TEST_P( CommModes, SkippedBarrierIsProtocolFault )
{
   EXPECT_THROW( run_ranks( 3, GetParam(),
                            [&]( Communicator& c ) {
                               if( c.rank() != 1 )
                                  c.barrier();
                            } ),
                 ProtocolFault );
}

TEST_P( CommModes, DivergentCallTypeIsProtocolFault )
{
   EXPECT_THROW( run_ranks( 2, GetParam(),
                            [&]( Communicator& c ) {
                               if( c.rank() == 0 )
                                  c.barrier();
                               else
                                  c.allreduce( 1, ops::sum<int>() );
                            } ),
                 ProtocolFault );
}

TEST_P( CommModes, MismatchedLengthIsProtocolFault )
{
   EXPECT_THROW( run_ranks( 2, GetParam(),
                            [&]( Communicator& c ) {
                               c.allreduce( std::vector<int>( c.rank() + 1, 1 ), ops::sum<int>() );
                            } ),
                 ProtocolFault );
}

TEST_P( CommModes, MismatchedTagIsProtocolFault )
{
   EXPECT_THROW( run_ranks( 2, GetParam(),
                            [&]( Communicator& c ) { c.barrier( c.rank() == 0 ? "x" : "y" ); } ),
                 ProtocolFault );
}

TEST_P( CommModes, InterleavedCollectivesInSameOrder )
{
   EXPECT_NO_THROW( run_ranks( 3, GetParam(), [&]( Communicator& c ) {
      for( int k = 0; k < 20; ++k )
      {
         c.barrier();
         EXPECT_EQ( c.allreduce( 1, ops::sum<int>() ), 3 );
         EXPECT_EQ( c.allgather( std::vector<int>{ c.rank() } ).size(), 3u );
      }
   } ) );
}

TEST_P( CommModes, FloatingSumBitIdenticalAcrossRuns )
{
   std::vector<double> vals{ 0.1, 1e16, -1e16, 0.7, 3.3 };
   auto once = [&] {
      double out = 0;
      run_ranks( 5, GetParam(), [&]( Communicator& c ) {
         const double r = c.allreduce( vals[c.rank()], ops::sum<double>() );
         if( c.rank() == 0 )
            out = r;
      } );
      return out;
   };
   const double a = once();
   for( int k = 0; k < 10; ++k )
      EXPECT_EQ( once(), a );
   EXPECT_EQ( a, ( ( ( ( 0.1 + 1e16 ) + -1e16 ) + 0.7 ) + 3.3 ) );
}

TEST_P( CommModes, RankErrorIsRethrown )
{
   EXPECT_THROW( run_ranks( 2, GetParam(),
                            [&]( Communicator& c ) {
                               if( c.rank() == 1 )
                                  throw std::runtime_error( "boom" );
                               c.barrier();
                            } ),
                 std::exception );
}

INSTANTIATE_TEST_SUITE_P( Modes, CommModes, ::testing::Values( ExecMode::Lockstep, ExecMode::Threaded ) );

TEST( Communicator, SelfCommunicatorIsIdentity )
{
   auto c = self_communicator();
   EXPECT_EQ( c.size(), 1 );
   EXPECT_EQ( c.allreduce( 5, ops::sum<int>() ), 5 );
   EXPECT_EQ( c.allreduce( 2.0, ops::max<double>() ), 2.0 );
   EXPECT_EQ( c.allgather( std::vector<int>{ 1, 2 } ), ( std::vector<int>{ 1, 2 } ) );
}

TEST( Communicator, OperatorLaws )
{
   std::vector<double> v{ -3, 0, 2.5, 1e9 };
   for( auto op : { ops::sum<double>(), ops::min<double>(), ops::max<double>() } )
   {
      ASSERT_TRUE( op.commutative_associative );
      for( double a : v )
      {
         EXPECT_EQ( op.combine( op.identity, a ), a );
         for( double b : v )
         {
            EXPECT_EQ( op.combine( a, b ), op.combine( b, a ) );
            for( double c : v )
               if( op.identity != 0 )
                  EXPECT_EQ( op.combine( op.combine( a, b ), c ), op.combine( a, op.combine( b, c ) ) );
         }
      }
   }
}
