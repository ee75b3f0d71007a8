#include "ahlp/generator/generator.hpp"
#include "ahlp/io/blocks.hpp"
#include "ahlp/io/solution_file.hpp"
#include "ahlp/io/stats.hpp"
#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace ahlp;

namespace
{

MonolithicLP parse( const std::string& text )
{
   std::istringstream in( text );
   return read_mps( in, "t.mps" );
}

int parse_error_line( const std::string& text )
{
   try
   {
      parse( text );
   }
   catch( const ParseError& e )
   {
      return e.line();
   }
   return -1;
}

MonolithicLP round_trip_mps( const MonolithicLP& lp )
{
   std::stringstream s;
   write_mps( lp, s );
   return read_mps( s );
}

GenSpec small_spec( std::uint64_t seed )
{
   GenSpec g;
   g.seed = seed;
   g.blocks = 3;
   g.rows = 6;
   g.cols = 7;
   g.duplicates = 0.2;
   g.fixed = 0.1;
   g.misplaced = 0.2;
   return g;
}

} // namespace

TEST( Mps, MinimalProblem )
{
   auto lp = parse( "NAME tiny\nROWS\n N obj\n L r\nCOLUMNS\n x obj 1 r 2\nRHS\n rhs r 4\nENDATA\n" );
   EXPECT_EQ( lp.name, "tiny" );
   ASSERT_EQ( lp.ncols(), 1 );
   ASSERT_EQ( lp.nineq(), 1 );
   EXPECT_EQ( lp.neq(), 0 );
   EXPECT_EQ( lp.c[0], 1 );
   EXPECT_EQ( lp.f[0], 4 );
   EXPECT_EQ( lp.d[0], -kInf );
   EXPECT_EQ( lp.l[0], 0 );
   EXPECT_EQ( lp.u[0], kInf );
   EXPECT_EQ( lp.C.row_vals( 0 )[0], 2 );
}

TEST( Mps, RangesFollowConvention )
{
   auto lp = parse( "NAME r\nROWS\n N obj\n L a\n G b\n E c\n E d\nCOLUMNS\n x a 1 b 1\n x c 1 d 1\n"
                    "RHS\n rhs a 10 b 2\n rhs c 5 d 5\nRANGES\n rng a -3 b 4\n rng c 2 d -2\nENDATA\n" );
   ASSERT_EQ( lp.nineq(), 4 );
   EXPECT_EQ( lp.d[0], 7 );
   EXPECT_EQ( lp.f[0], 10 );
   EXPECT_EQ( lp.d[1], 2 );
   EXPECT_EQ( lp.f[1], 6 );
   EXPECT_EQ( lp.d[2], 5 );
   EXPECT_EQ( lp.f[2], 7 );
   EXPECT_EQ( lp.d[3], 3 );
   EXPECT_EQ( lp.f[3], 5 );
}

TEST( Mps, ObjectiveRhsIsNegatedOffset )
{
   auto lp = parse( "NAME o\nROWS\n N obj\nCOLUMNS\n x obj 1\nRHS\n rhs obj 2.5\nENDATA\n" );
   EXPECT_EQ( lp.objective_offset, -2.5 );
}

TEST( Mps, BoundTypes )
{
   auto lp = parse( "NAME b\nROWS\n N obj\nCOLUMNS\n a obj 1\n b obj 1\n c obj 1\n d obj 1\n e obj 1\n"
                    "BOUNDS\n UP bnd a -2\n FR bnd b\n MI bnd c\n UP bnd c 3\n FX bnd d 4\n LO bnd e 1\n"
                    " PL bnd e\nENDATA\n" );
   EXPECT_EQ( lp.l[0], -kInf );
   EXPECT_EQ( lp.u[0], -2 );
   EXPECT_EQ( lp.l[1], -kInf );
   EXPECT_EQ( lp.u[1], kInf );
   EXPECT_EQ( lp.l[2], -kInf );
   EXPECT_EQ( lp.u[2], 3 );
   EXPECT_EQ( lp.l[3], 4 );
   EXPECT_EQ( lp.u[3], 4 );
   EXPECT_EQ( lp.l[4], 1 );
   EXPECT_EQ( lp.u[4], kInf );
}

TEST( Mps, ErrorsCarryLineNumbers )
{
   EXPECT_EQ( parse_error_line( "NAME x\nROWS\n N obj\nCOLS\n x obj 1\nENDATA\n" ), 4 );
   EXPECT_EQ( parse_error_line( "NAME x\nROWS\n N obj\n L r\nCOLUMNS\n x r 1\n x r 2\nENDATA\n" ), 7 );
   EXPECT_EQ( parse_error_line( "NAME x\nROWS\n N obj\nCOLUMNS\n x q 1\nENDATA\n" ), 5 );
   EXPECT_EQ( parse_error_line( "NAME x\nROWS\n N obj\nCOLUMNS\n x obj 1\nBOUNDS\n UP bnd y 1\nENDATA\n" ), 7 );
   EXPECT_EQ( parse_error_line( "NAME x\nROWS\n N obj\n L r\n L r\nENDATA\n" ), 5 );
   EXPECT_EQ( parse_error_line( "NAME x\nOBJSENSE\n    MAX\nROWS\n N obj\nENDATA\n" ), 3 );
   EXPECT_EQ( parse_error_line( "NAME x\nOBJSENSE MAX\nROWS\n N obj\nENDATA\n" ), 2 );
   EXPECT_EQ( parse_error_line( "NAME x\nROWS\n N obj\nCOLUMNS\n x obj 1\n" ), 5 );
}

TEST( Mps, MinimizationSenseAccepted )
{
   EXPECT_EQ( parse( "NAME x\nOBJSENSE\n    MIN\nROWS\n N obj\nCOLUMNS\n x obj 1\nENDATA\n" ).ncols(), 1 );
}

TEST( Mps, FreeRowsAfterObjectiveKept )
{
   auto lp = parse( "NAME x\nROWS\n N obj\n N free\nCOLUMNS\n x obj 1 free 3\nENDATA\n" );
   ASSERT_EQ( lp.nineq(), 1 );
   EXPECT_EQ( lp.d[0], -kInf );
   EXPECT_EQ( lp.f[0], kInf );
   EXPECT_EQ( round_trip_mps( lp ), lp );
}

TEST( Mps, WriteReadRoundTripIsIdentical )
{
   for( std::uint64_t seed = 1; seed <= 20; ++seed )
   {
      auto lp = assemble_monolithic( generate( small_spec( seed ) ).problem ).first;
      lp.objective_offset = 0.125 * static_cast<Real>( seed );
      const auto back = round_trip_mps( lp );
      EXPECT_EQ( back, lp ) << "seed " << seed;
      const auto a = solve_reference( lp ), b = solve_reference( back );
      EXPECT_EQ( a.status, b.status );
      EXPECT_EQ( a.value, b.value );
   }
}

TEST( Blocks, GeneratedAnnotationIsValid )
{
   for( std::uint64_t seed = 1; seed <= 20; ++seed )
   {
      const auto p = generate( small_spec( seed ) ).problem;
      auto [lp, a] = assemble_monolithic( p );
      std::stringstream s;
      write_blocks( lp, a, s );
      const auto back = read_blocks( s, lp );
      EXPECT_EQ( back, a );
      EXPECT_EQ( split( lp, back ), p );
   }
}

namespace
{

MonolithicLP two_block_lp()
{
   test::LpBuilder b( 2 );
   b.col( 0, 1, 1, 0, "z" );
   b.col( 0, 1, 1, 1, "x1" );
   b.col( 0, 1, 1, 2, "x2" );
   b.eq( { { 0, 1 }, { 1, 1 } }, 1, 1, "r1" );
   b.eq( { { 1, 1 }, { 2, 1 } }, 1, kLinkOwner, "link" );
   b.ineq( { { 2, 1 } }, 0, 1, 2, "r2" );
   return b.lp();
}

BlockAssignment annotate( const MonolithicLP& lp, const std::string& text )
{
   std::istringstream in( text );
   return read_blocks( in, lp, "t.blk" );
}

} // namespace

TEST( Blocks, ConsistentAnnotation )
{
   const auto lp = two_block_lp();
   auto a = annotate( lp, "NBLOCKS 2\nROW r1 1\nROW link L\nROW r2 2\nCOL z 0\nCOL x1 1\nCOL x2 2\n" );
   EXPECT_EQ( a.eq_owner, ( std::vector<int>{ 1, kLinkOwner } ) );
   EXPECT_EQ( a.ineq_owner, ( std::vector<int>{ 2 } ) );
   EXPECT_TRUE( validate_arrowhead( split( lp, a ) ).empty() );
}

TEST( Blocks, CrossBlockEntryNamed )
{
   const auto lp = two_block_lp();
   try
   {
      annotate( lp, "NBLOCKS 2\nROW r1 2\nROW link L\nROW r2 2\nCOL z 0\nCOL x1 1\nCOL x2 2\n" );
      FAIL() << "expected a structure error";
   }
   catch( const InvalidProblem& e )
   {
      EXPECT_NE( std::string( e.what() ).find( "(r1, x1)" ), std::string::npos ) << e.what();
   }
}

TEST( Blocks, AnnotationErrors )
{
   const auto lp = two_block_lp();
   EXPECT_THROW( annotate( lp, "ROW r1 1\n" ), ParseError );
   EXPECT_THROW( annotate( lp, "NBLOCKS 2\nROW r1 1\nROW link L\nCOL z 0\nCOL x1 1\nCOL x2 2\n" ), ParseError );
   EXPECT_THROW( annotate( lp, "NBLOCKS 2\nROW r1 1\nROW r1 1\nROW link L\nROW r2 2\nCOL z 0\nCOL x1 1\nCOL x2 2\n" ),
                 ParseError );
   EXPECT_THROW( annotate( lp, "NBLOCKS 2\nROW r1 3\nROW link L\nROW r2 2\nCOL z 0\nCOL x1 1\nCOL x2 2\n" ),
                 ParseError );
   EXPECT_THROW( annotate( lp, "NBLOCKS 2\nROW r1 1\nROW link L\nROW r2 2\nCOL z L\nCOL x1 1\nCOL x2 2\n" ),
                 ParseError );
   EXPECT_THROW( annotate( lp, "NBLOCKS 2\nROW q 1\n" ), ParseError );
}

TEST( Stats, Percentages )
{
   EXPECT_DOUBLE_EQ( percentage( 80, 100 ), 80.0 );
   EXPECT_DOUBLE_EQ( percentage( 0, 0 ), 100.0 );
   StatsReport r;
   r.original = { 100, 10, 10 };
   r.reduced = { 80, 5, 10 };
   const auto j = to_json( r );
   EXPECT_DOUBLE_EQ( j.at( "nonzeros_pct" ).get<double>(), 80.0 );
   EXPECT_DOUBLE_EQ( j.at( "rows_pct" ).get<double>(), 50.0 );
   EXPECT_EQ( j.at( "presolvers" ).size(), kNumPresolvers );
}

TEST( Stats, ReducedCountsMatchWrittenProblem )
{
   const auto p = generate( small_spec( 4 ) ).problem;
   auto run = presolve( p, {}, 2 );
   ASSERT_EQ( run.status, PresolveStatus::Ok );
   const auto stats = to_json( make_stats( run, "g4" ) );
   const auto back = round_trip_mps( run.reduced_lp() );
   EXPECT_EQ( stats["reduced"]["nonzeros"].get<std::int64_t>(), back.A.nnz() + back.C.nnz() );
   EXPECT_EQ( stats["reduced"]["rows"].get<std::int64_t>(), back.neq() + back.nineq() );
   EXPECT_EQ( stats["reduced"]["cols"].get<std::int64_t>(), back.ncols() );
   EXPECT_LE( stats["nonzeros_pct"].get<double>(), 100.0 );
}

TEST( SolutionFile, RoundTrip )
{
   const auto lp = two_block_lp();
   const auto r = solve_reference( lp );
   ASSERT_EQ( r.status, OracleStatus::Optimal );
   std::stringstream s;
   write_solution( lp, r.solution, s );
   const auto back = read_solution( lp, s );
   EXPECT_EQ( back.x, r.solution.x );
   EXPECT_EQ( back.y, r.solution.y );
   EXPECT_EQ( back.zplus, r.solution.zplus );
   EXPECT_EQ( back.gamma, r.solution.gamma );
}

TEST( StackFile, RoundTripAndCorruption )
{
   const auto p = generate( small_spec( 6 ) ).problem;
   auto run = presolve( p, {}, 2 );
   ASSERT_EQ( run.status, PresolveStatus::Ok );
   StackFile f{ run.stacks, run.ids };
   const auto j = to_json( f );
   const auto back = stack_file_from_json( j );
   EXPECT_EQ( to_json( back ), j );
   auto bad = j;
   bad["stacks"][0]["entries"][0]["type"] = "nonsense";
   EXPECT_THROW( stack_file_from_json( bad ), StackCorruption );
   bad = j;
   bad.erase( "reduced_cols" );
   EXPECT_THROW( stack_file_from_json( bad ), StackCorruption );
}
