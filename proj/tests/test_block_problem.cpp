#include "ahlp/generator/generator.hpp"
#include "ahlp/model/block_problem.hpp"
#include "fixtures.hpp"

#include <gtest/gtest.h>

using namespace ahlp;

TEST( BlockProblem, WellFormedProblemValidates )
{
   EXPECT_TRUE( validate_arrowhead( test::two_block_problem() ).empty() );
}

TEST( BlockProblem, WrongColumnCountIsOneDimensionViolation )
{
   auto p = test::two_block_problem();
   p.blocks[0].B = SparseMatrix::from_triplets( 1, 2, { { 0, 0, 1.0 } } );
   auto v = validate_arrowhead( p );
   ASSERT_EQ( v.size(), 1u );
   EXPECT_EQ( v[0].rfind( "dimension:", 0 ), 0u ) << v[0];
}

TEST( BlockProblem, BoundInversionReported )
{
   auto p = test::two_block_problem();
   p.blocks[1].vars.lower[0] = 6;
   auto v = validate_arrowhead( p );
   ASSERT_EQ( v.size(), 1u );
   EXPECT_EQ( v[0].rfind( "bounds:", 0 ), 0u ) << v[0];
}

TEST( BlockProblem, ReplicationDivergenceIsOneViolation )
{
   auto full = test::two_block_problem();
   auto slices = distribute( full, 2 );
   slices[1].zero.vars.upper[0] = 4;
   std::vector<std::vector<std::string>> got( 2 );
   run_ranks( 2, ExecMode::Lockstep,
              [&]( Communicator& c ) { got[c.rank()] = validate_arrowhead( slices[c.rank()], c ); } );
   for( const auto& v : got )
   {
      ASSERT_EQ( v.size(), 1u );
      EXPECT_EQ( v[0].rfind( "replication:", 0 ), 0u ) << v[0];
   }
}

TEST( BlockProblem, AssembleDocumentedOrder )
{
   auto [lp, a] = assemble_monolithic( test::two_block_problem() );
   EXPECT_EQ( lp.ncols(), 3 );
   EXPECT_EQ( lp.col_names, ( std::vector<std::string>{ "x0", "x1", "x2" } ) );
   EXPECT_EQ( lp.eq_names, ( std::vector<std::string>{ "b1_r", "b2_r", "l_r" } ) );
   EXPECT_EQ( lp.b, ( std::vector<Real>{ 2, 3, 1.5 } ) );
   EXPECT_EQ( lp.A.at( 1, 0 ), 1.0 );
   EXPECT_EQ( lp.A.at( 1, 2 ), 2.0 );
   EXPECT_EQ( lp.A.at( 2, 0 ), 0.0 );
   EXPECT_EQ( lp.A.at( 2, 1 ), 1.0 );
   EXPECT_EQ( a.eq_owner, ( std::vector<int>{ 1, 2, kLinkOwner } ) );
   EXPECT_EQ( a.col_owner, ( std::vector<int>{ 0, 1, 2 } ) );
}

TEST( BlockProblem, EmptyLinkingPartIsBlockDiagonal )
{
   auto p = test::two_block_problem();
   p.zero = LinkingPart{};
   p.zero.A0 = p.zero.C0 = p.zero.F0 = p.zero.G0 = SparseMatrix( 0, 0 );
   for( auto& b : p.blocks )
   {
      b.A = SparseMatrix( 1, 0 );
      b.C = SparseMatrix( 0, 0 );
      b.F = SparseMatrix( 0, 1 );
      b.G = SparseMatrix( 0, 1 );
   }
   ASSERT_TRUE( validate_arrowhead( p ).empty() );
   auto [lp, a] = assemble_monolithic( p );
   EXPECT_EQ( lp.A.nnz(), 2 );
   EXPECT_EQ( lp.A.at( 0, 0 ), 1.0 );
   EXPECT_EQ( lp.A.at( 1, 1 ), 2.0 );
}

TEST( BlockProblem, AssembleSplitAssembleRoundTrip )
{
   for( std::uint64_t seed = 1; seed <= 30; ++seed )
   {
      GenSpec s;
      s.seed = seed;
      s.blocks = 1 + seed % 4;
      s.duplicates = 0.1;
      s.misplaced = 0.1;
      auto g = generate( s );
      auto [lp, a] = assemble_monolithic( g.problem );
      auto back = split( lp, a );
      EXPECT_EQ( back, g.problem ) << "seed " << seed;
      auto [lp2, a2] = assemble_monolithic( back );
      EXPECT_EQ( lp2, lp );
      EXPECT_EQ( a2, a );
   }
}

TEST( BlockProblem, SplitRejectsCrossBlockEntry )
{
   auto [lp, a] = assemble_monolithic( test::two_block_problem() );
   auto t = lp.A.triplets();
   t.push_back( { 0, 2, 1.0 } );
   lp.A = SparseMatrix::from_triplets( lp.A.rows(), lp.A.cols(), t );
   try
   {
      split( lp, a );
      FAIL();
   }
   catch( const InvalidProblem& e )
   {
      EXPECT_NE( std::string( e.what() ).find( "b1_r" ), std::string::npos );
      EXPECT_NE( std::string( e.what() ).find( "x2" ), std::string::npos );
   }
}

TEST( BlockProblem, NnzCountsReplicatedOnce )
{
   BlockProblem p;
   p.num_blocks = 2;
   p.zero.vars.push( 0, 1, 0, "x0" );
   p.zero.link_eq.rhs = { 0 };
   p.zero.link_eq.names = { "l" };
   p.zero.A0 = SparseMatrix( 0, 1 );
   p.zero.C0 = SparseMatrix( 0, 1 );
   p.zero.F0 = SparseMatrix::from_triplets( 1, 1, { { 0, 0, 1 } } );
   p.zero.G0 = SparseMatrix( 0, 1 );
   p.zero.ineq0.lower = { 0, 0 };
   p.zero.ineq0.upper = { 1, 1 };
   p.zero.ineq0.names = { "c0", "c1" };
   p.zero.C0 = SparseMatrix::from_triplets( 2, 1, { { 0, 0, 1 }, { 1, 0, 2 } } );
   for( int b = 1; b <= 2; ++b )
   {
      LocalBlock blk;
      blk.id = b;
      for( int j = 0; j < 3; ++j )
         blk.vars.push( 0, 1, 0, "x" + std::to_string( b ) + std::to_string( j ) );
      blk.eq.rhs = { 1 };
      blk.eq.names = { "r" + std::to_string( b ) };
      blk.A = SparseMatrix::from_triplets( 1, 1, { { 0, 0, 1 } } );
      blk.B = SparseMatrix::from_triplets( 1, 3, { { 0, 0, 1 }, { 0, 1, 1 }, { 0, 2, 1 } } );
      blk.C = SparseMatrix( 0, 1 );
      blk.D = SparseMatrix( 0, 3 );
      blk.F = SparseMatrix( 1, 3 );
      blk.G = SparseMatrix( 0, 3 );
      blk.F = SparseMatrix::from_triplets( 1, 3, { { 0, 1, 1 } } );
      p.blocks.push_back( blk );
   }
   auto slices = distribute( p, 2 );
   std::vector<SizeCounts> got( 2 );
   run_ranks( 2, ExecMode::Lockstep, [&]( Communicator& c ) { got[c.rank()] = nnz_counts( slices[c.rank()], c ); } );
   for( const auto& g : got )
   {
      EXPECT_EQ( g.nonzeros, 13 );
      EXPECT_EQ( g.rows, 5 );
      EXPECT_EQ( g.cols, 7 );
   }
}

TEST( BlockProblem, NnzCountsEmptyProblem )
{
   BlockProblem p;
   EXPECT_EQ( nnz_counts( p ), ( SizeCounts{ 0, 0, 0 } ) );
}

TEST( BlockProblem, NnzCountsMatchGeneratorAndAssembly )
{
   GenSpec s;
   s.blocks = 4;
   s.rows = 10;
   s.cols = 10;
   s.seed = 99;
   auto g = generate( s );
   auto slices = distribute( g.problem, 4 );
   SizeCounts got;
   run_ranks( 4, ExecMode::Threaded, [&]( Communicator& c ) {
      auto r = nnz_counts( slices[c.rank()], c );
      if( c.rank() == 0 )
         got = r;
   } );
   EXPECT_EQ( got, g.manifest.declared );
   auto [lp, a] = assemble_monolithic( g.problem );
   EXPECT_EQ( got.nonzeros, lp.A.nnz() + lp.C.nnz() );
   EXPECT_EQ( got.rows, lp.neq() + lp.nineq() );
   EXPECT_EQ( got.cols, lp.ncols() );
}

TEST( BlockProblem, DistributeGatherRoundTrip )
{
   GenSpec s;
   s.blocks = 5;
   auto g = generate( s );
   for( int r = 1; r <= 5; ++r )
   {
      auto slices = distribute( g.problem, r );
      EXPECT_EQ( gather( slices ), g.problem );
      for( const auto& sl : slices )
         EXPECT_TRUE( validate_arrowhead( sl ).empty() );
   }
   EXPECT_THROW( distribute( g.problem, 6 ), InvalidProblem );
}
