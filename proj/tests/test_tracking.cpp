#include "ahlp/generator/generator.hpp"
#include "ahlp/tracking/tracking.hpp"
#include "fixtures.hpp"
#include "tracking_events.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace ahlp;
using namespace ahlp::test;

namespace
{

/// One block, one local row sum_k a_k x_k with the given column bounds.
Workspace single_row( std::vector<Real> a, std::vector<std::pair<Real, Real>> bounds, bool eq = false )
{
   BlockProblem p;
   p.num_blocks = 1;
   p.zero.A0 = p.zero.C0 = p.zero.F0 = p.zero.G0 = SparseMatrix( 0, 0 );
   LocalBlock blk;
   std::vector<Triplet> t;
   for( std::size_t j = 0; j < a.size(); ++j )
   {
      blk.vars.push( bounds[j].first, bounds[j].second, 0, "x" + std::to_string( j ) );
      t.push_back( { 0, Index( j ), a[j] } );
   }
   const Index n = static_cast<Index>( a.size() );
   if( eq )
   {
      blk.eq.rhs = { 0 };
      blk.eq.names = { "r" };
      blk.A = SparseMatrix( 1, 0 );
      blk.B = SparseMatrix::from_triplets( 1, n, t );
      blk.C = SparseMatrix( 0, 0 );
      blk.D = SparseMatrix( 0, n );
   }
   else
   {
      blk.ineq.lower = { -kInf };
      blk.ineq.upper = { 0 };
      blk.ineq.names = { "r" };
      blk.A = SparseMatrix( 0, 0 );
      blk.B = SparseMatrix( 0, n );
      blk.C = SparseMatrix( 1, 0 );
      blk.D = SparseMatrix::from_triplets( 1, n, t );
   }
   blk.F = SparseMatrix( 0, n );
   blk.G = SparseMatrix( 0, n );
   p.blocks.push_back( blk );
   return make_workspace( p, 0, 1, gid_layout( p ) );
}

const RowKey kRow = RowKey::make( RowScope::Local, 0 );

} // namespace

TEST( Tracking, FiniteActivity )
{
   auto ws = single_row( { 2, -3 }, { { 0, 1 }, { 0, 2 } } );
   auto comm = self_communicator();
   auto t = Tracking::compute_from_scratch( ws, comm );
   EXPECT_EQ( t.act( kRow ).min(), -6.0 );
   EXPECT_EQ( t.act( kRow ).max(), 2.0 );
   EXPECT_EQ( t.act( kRow ).min_inf, 0 );
   EXPECT_EQ( t.act( kRow ).max_inf, 0 );
   EXPECT_EQ( t.row_nnz( kRow ), 2 );
}

TEST( Tracking, InfiniteContributionCounted )
{
   auto ws = single_row( { 1, 1 }, { { 0, 3 }, { 0, kInf } } );
   auto comm = self_communicator();
   auto t = Tracking::compute_from_scratch( ws, comm );
   EXPECT_EQ( t.act( kRow ).max_fin.value(), 3.0 );
   EXPECT_EQ( t.act( kRow ).max_inf, 1 );
   EXPECT_EQ( t.act( kRow ).max(), kInf );
   EXPECT_EQ( t.act( kRow ).min(), 0.0 );
}

TEST( Tracking, TightenUpperBound )
{
   auto ws = single_row( { 2, 1 }, { { 0, 5 }, { 0, 1 } } );
   auto comm = self_communicator();
   auto t = Tracking::compute_from_scratch( ws, comm );
   const Real before = t.act( kRow ).max();
   t.on_bound_change( ws, ColKey::local( 0 ), 0, 5, 0, 3 );
   EXPECT_EQ( before - t.act( kRow ).max(), 4.0 );
}

TEST( Tracking, TightenInfiniteLowerBound )
{
   auto ws = single_row( { 1, 1 }, { { 0, 1 }, { -kInf, 1 } } );
   auto comm = self_communicator();
   auto t = Tracking::compute_from_scratch( ws, comm );
   EXPECT_EQ( t.act( kRow ).min_inf, 1 );
   const Real fin = t.act( kRow ).min_fin.value();
   t.on_bound_change( ws, ColKey::local( 1 ), -kInf, 1, 0, 1 );
   EXPECT_EQ( t.act( kRow ).min_inf, 0 );
   EXPECT_EQ( t.act( kRow ).min_fin.value(), fin );
}

TEST( Tracking, WideningIsContractViolation )
{
   auto ws = single_row( { 1 }, { { 0, 1 } } );
   auto comm = self_communicator();
   auto t = Tracking::compute_from_scratch( ws, comm );
   EXPECT_THROW( t.on_bound_change( ws, ColKey::local( 0 ), 0, 1, -1, 1 ), ContractViolation );
}

TEST( Tracking, EntryRemoval )
{
   auto ws = single_row( { 2, 1 }, { { 0, 1 }, { 0, 4 } } );
   auto comm = self_communicator();
   auto t = Tracking::compute_from_scratch( ws, comm );
   const Real mx = t.act( kRow ).max(), mn = t.act( kRow ).min();
   t.on_entry_removed( ws, kRow, ColKey::local( 0 ), 2 );
   EXPECT_EQ( mx - t.act( kRow ).max(), 2.0 );
   EXPECT_EQ( mn - t.act( kRow ).min(), 0.0 );
   EXPECT_EQ( t.row_nnz( kRow ), 1 );
   EXPECT_EQ( t.col_nnz( ColKey::local( 0 ) ), 0 );
}

TEST( Tracking, FreeEntryRemovalOnlyTouchesCounts )
{
   auto ws = single_row( { 2, 1 }, { { 0, 1 }, { -kInf, kInf } } );
   auto comm = self_communicator();
   auto t = Tracking::compute_from_scratch( ws, comm );
   auto before = t.act( kRow );
   t.on_entry_removed( ws, kRow, ColKey::local( 1 ), 1 );
   EXPECT_EQ( t.act( kRow ).min_fin, before.min_fin );
   EXPECT_EQ( t.act( kRow ).max_fin, before.max_fin );
   EXPECT_EQ( t.act( kRow ).min_inf, 0 );
   EXPECT_EQ( t.act( kRow ).max_inf, 0 );
}

TEST( Tracking, ResidualActivity )
{
   ActivityRecord r;
   r.account( 1, 0, 10, +1 );
   r.account( 1, 0, 1, +1 );
   EXPECT_EQ( r.residual_min( 1, 0, 10 ), 0.0 );
   EXPECT_EQ( r.residual_max( 1, 0, 10 ), 1.0 );
   r.account( 1, -kInf, 3, +1 );
   EXPECT_EQ( r.residual_min( 1, -kInf, 3 ), 0.0 );
   EXPECT_EQ( r.residual_min( 1, 0, 10 ), -kInf );
}

TEST( Tracking, SyncAppliesSummedDeltas )
{
   auto full = test::two_block_problem();
   std::vector<BlockProblem> slices = distribute( full, 2 );
   slices.insert( slices.begin(), slices[0] );
   slices[0].blocks.clear();
   std::vector<ActivityRecord> after( 3 );
   std::vector<std::uint8_t> empty( 3 );
   run_ranks( 3, ExecMode::Lockstep, [&]( Communicator& c ) {
      auto layout = gid_layout( slices[c.rank()], c );
      auto ws = make_workspace( slices[c.rank()], c.rank(), 3, layout );
      auto t = Tracking::compute_from_scratch( ws, c );
      const auto before = t.link_act[0];
      if( c.rank() == 1 )
         t.buffer.act[0].max_fin.add( 2 );
      if( c.rank() == 2 )
         t.buffer.act[0].max_fin.add( -1 );
      t.sync_linking( ws, c );
      after[c.rank()] = t.link_act[0];
      EXPECT_EQ( t.link_act[0].max_fin.value() - before.max_fin.value(), 1.0 );
      empty[c.rank()] = t.buffer.empty();
   } );
   EXPECT_EQ( after[0], after[1] );
   EXPECT_EQ( after[1], after[2] );
   for( auto e : empty )
      EXPECT_TRUE( e );
}

TEST( Tracking, SyncWithEmptyBuffersIsNoop )
{
   auto full = test::two_block_problem();
   auto slices = distribute( full, 2 );
   run_ranks( 2, ExecMode::Threaded, [&]( Communicator& c ) {
      auto ws = make_workspace( slices[c.rank()], c.rank(), 2, gid_layout( slices[c.rank()], c ) );
      auto t = Tracking::compute_from_scratch( ws, c );
      auto copy = t;
      t.sync_linking( ws, c );
      EXPECT_TRUE( t.same_state( copy ) );
   } );
}

TEST( Tracking, LinkingActivityCountsReplicatedPartOnce )
{
   auto full = test::two_block_problem();
   full.zero.F0 = SparseMatrix::from_triplets( 1, 1, { { 0, 0, 1.0 } } );
   for( int nr : { 1, 2 } )
   {
      auto slices = distribute( full, nr );
      run_ranks( nr, ExecMode::Lockstep, [&]( Communicator& c ) {
         auto ws = make_workspace( slices[c.rank()], c.rank(), nr, gid_layout( slices[c.rank()], c ) );
         auto t = Tracking::compute_from_scratch( ws, c );
         EXPECT_EQ( t.link_act[0].max(), 15.0 );
         EXPECT_EQ( t.link_nnz[0], 3 );
         EXPECT_EQ( t.link_col_nnz[0], 3 );
      } );
   }
}

namespace
{

void run_random_events( int nranks, ExecMode mode, std::uint64_t seed, int events )
{
   GenSpec s;
   s.seed = seed;
   s.blocks = 4;
   s.rows = 30;
   s.cols = 30;
   s.link_rows = 6;
   s.link_cols = 5;
   s.zero_rows = 3;
   s.density = 0.3;
   auto g = generate( s );
   auto slices = distribute( g.problem, nranks );
   std::vector<std::string> mismatch( nranks );
   run_ranks( nranks, mode, [&]( Communicator& c ) {
      auto ws = make_workspace( slices[c.rank()], c.rank(), nranks, gid_layout( slices[c.rank()], c ) );
      auto t = Tracking::compute_from_scratch( ws, c );
      EventDriver drv{ ws, t, std::mt19937_64( seed ), std::mt19937_64( seed * 7919 + c.rank() ) };
      for( int k = 0; k < events; ++k )
      {
         drv.step();
         if( k % 997 == 996 )
            t.sync_linking( ws, c );
      }
      t.sync_linking( ws, c );
      EXPECT_TRUE( t.buffer.empty() );
      auto fresh = Tracking::compute_from_scratch( ws, c );
      mismatch[c.rank()] = diff_alive( ws, t, fresh );
   } );
   for( int r = 0; r < nranks; ++r )
      EXPECT_EQ( mismatch[r], "" ) << "rank " << r;
}

} // namespace

TEST( Tracking, RandomEventsMatchFromScratchLockstep )
{
   run_random_events( 4, ExecMode::Lockstep, 17, 10000 );
}

TEST( Tracking, RandomEventsMatchFromScratchThreaded )
{
   run_random_events( 4, ExecMode::Threaded, 23, 10000 );
}

TEST( Tracking, RandomEventsSingleRank )
{
   run_random_events( 1, ExecMode::Lockstep, 5, 5000 );
}
