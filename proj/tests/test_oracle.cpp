#include "ahlp/generator/generator.hpp"
#include "ahlp/oracle/simplex.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace ahlp;

namespace
{

MonolithicLP one_var( Real l, Real u, Real c )
{
   MonolithicLP lp;
   lp.A = SparseMatrix( 0, 1 );
   lp.C = SparseMatrix( 0, 1 );
   lp.c = { c };
   lp.l = { l };
   lp.u = { u };
   lp.col_names = { "x" };
   return lp;
}

/// Random LP feasible at an interior point with costs making it bounded.
MonolithicLP random_lp( std::mt19937_64& rng, Index m, Index n )
{
   MonolithicLP lp;
   std::vector<Real> xs( n );
   for( Index j = 0; j < n; ++j )
   {
      xs[j] = Real( int( rng() % 11 ) - 5 );
      const int kind = rng() % 4;
      lp.l.push_back( kind == 3 ? -kInf : xs[j] - Real( rng() % 3 + 1 ) );
      lp.u.push_back( kind >= 2 ? kInf : xs[j] + Real( rng() % 3 + 1 ) );
      Real c = Real( int( rng() % 11 ) - 5 );
      if( !is_finite( lp.l[j] ) && c > 0 )
         c = 0;
      if( !is_finite( lp.u[j] ) && c < 0 )
         c = -c;
      if( !is_finite( lp.l[j] ) && !is_finite( lp.u[j] ) )
         c = 0;
      lp.c.push_back( c );
      lp.col_names.push_back( "x" + std::to_string( j ) );
   }
   std::vector<Triplet> ea, ec;
   for( Index i = 0; i < m; ++i )
   {
      const bool eq = rng() % 3 == 0;
      Real act = 0;
      for( Index j = 0; j < n; ++j )
         if( rng() % 4 == 0 )
         {
            const Real v = Real( int( rng() % 9 ) - 4 );
            if( v == 0 )
               continue;
            ( eq ? ea : ec ).push_back( { eq ? lp.neq() : lp.nineq(), j, v } );
            act += v * xs[j];
         }
      if( eq )
      {
         lp.b.push_back( act );
         lp.eq_names.push_back( "e" + std::to_string( i ) );
      }
      else
      {
         lp.d.push_back( rng() % 2 ? act - Real( rng() % 3 ) : -kInf );
         lp.f.push_back( act + Real( rng() % 3 ) );
         lp.ineq_names.push_back( "i" + std::to_string( i ) );
      }
   }
   lp.A = SparseMatrix::from_triplets( lp.neq(), n, ea );
   lp.C = SparseMatrix::from_triplets( lp.nineq(), n, ec );
   return lp;
}

/// Independent optimality validation: primal feasibility, reduced cost signs
/// matching the position of each variable, and complementary multipliers.
Real independent_optimality_residual( const MonolithicLP& lp, const PrimalDualSolution& s )
{
   Real worst = 0;
   std::vector<Real> rc = lp.c;
   for( const auto& t : lp.A.triplets() )
      rc[t.col] -= t.val * s.y[t.row];
   for( const auto& t : lp.C.triplets() )
      rc[t.col] -= t.val * ( s.zplus[t.row] - s.zminus[t.row] );
   for( Index j = 0; j < lp.ncols(); ++j )
   {
      const Real slack_l = s.x[j] - lp.l[j], slack_u = lp.u[j] - s.x[j];
      worst = std::max( worst, std::max<Real>( -slack_l, 0 ) );
      worst = std::max( worst, std::max<Real>( -slack_u, 0 ) );
      if( rc[j] > 0 )
         worst = std::max( worst, rc[j] * std::min<Real>( slack_l, 1e6 ) );
      if( rc[j] < 0 )
         worst = std::max( worst, -rc[j] * std::min<Real>( slack_u, 1e6 ) );
   }
   return worst;
}

} // namespace

TEST( Oracle, MinXAtLeastOne )
{
   auto r = solve_reference( one_var( 1, kInf, 1 ) );
   ASSERT_EQ( r.status, OracleStatus::Optimal );
   EXPECT_NEAR( r.value, 1.0, 1e-12 );
   EXPECT_NEAR( r.solution.gamma[0], 1.0, 1e-12 );
}

TEST( Oracle, FreeImprovingDirectionIsUnbounded )
{
   EXPECT_EQ( solve_reference( one_var( -kInf, kInf, -1 ) ).status, OracleStatus::Unbounded );
}

TEST( Oracle, InfeasibleDetected )
{
   auto lp = one_var( 0, 1, 1 );
   lp.A = SparseMatrix::from_triplets( 1, 1, { { 0, 0, 3 } } );
   lp.b = { 6 };
   lp.eq_names = { "r" };
   EXPECT_EQ( solve_reference( lp ).status, OracleStatus::Infeasible );
}

TEST( Oracle, CapRefused )
{
   OracleOptions o;
   o.cap = 2;
   MonolithicLP lp;
   lp.A = SparseMatrix( 0, 3 );
   lp.C = SparseMatrix( 0, 3 );
   lp.c = lp.l = { 0, 0, 0 };
   lp.u = { 1, 1, 1 };
   EXPECT_THROW( solve_reference( lp, o ), OracleRefused );
}

TEST( Oracle, RandomInstancesPassKkt )
{
   std::mt19937_64 rng( 2024 );
   for( int k = 0; k < 60; ++k )
   {
      const Index m = 5 + rng() % 46, n = 5 + rng() % 46;
      auto lp = random_lp( rng, m, n );
      auto r = solve_reference( lp );
      ASSERT_EQ( r.status, OracleStatus::Optimal ) << k;
      auto rep = kkt_check( lp, r.solution );
      EXPECT_TRUE( rep.ok( 1e-8 ) ) << k << ": " << rep.describe();
      EXPECT_LE( independent_optimality_residual( lp, r.solution ), 1e-7 ) << k;
      EXPECT_NEAR( rep.primal_objective, r.value, 1e-9 * ( 1 + std::fabs( r.value ) ) );
   }
}

TEST( Oracle, Deterministic )
{
   std::mt19937_64 rng( 9 );
   auto lp = random_lp( rng, 30, 30 );
   auto a = solve_reference( lp ), b = solve_reference( lp );
   EXPECT_EQ( a.solution.x, b.solution.x );
   EXPECT_EQ( a.solution.y, b.solution.y );
}

TEST( Oracle, GeneratedInstancesSolvable )
{
   for( std::uint64_t seed = 1; seed <= 20; ++seed )
   {
      GenSpec s;
      s.seed = seed;
      s.blocks = 1 + seed % 8;
      s.rows = 10 + seed % 20;
      s.cols = 10 + seed % 20;
      auto g = generate( s );
      auto lp = assemble_monolithic( g.problem ).first;
      auto r = solve_reference( lp );
      ASSERT_EQ( r.status, OracleStatus::Optimal ) << seed;
      EXPECT_TRUE( kkt_check( lp, r.solution ).ok( 1e-8 ) ) << seed << ": " << kkt_check( lp, r.solution ).describe();
   }
}

TEST( Oracle, BruteForceParallelRows )
{
   auto m = SparseMatrix::from_triplets( 2, 2, { { 0, 0, 1 }, { 0, 1, 2 }, { 1, 0, 2 }, { 1, 1, 4 } } );
   auto p = brute_force_parallel_rows( m, 1e-10 );
   ASSERT_EQ( p.size(), 1u );
   EXPECT_EQ( p[0], ( ParallelPair{ 0, 1, 2.0 } ) );
   auto q = SparseMatrix::from_triplets( 2, 2, { { 0, 0, 1 }, { 0, 1, 2 }, { 1, 0, 2 }, { 1, 1, 5 } } );
   EXPECT_TRUE( brute_force_parallel_rows( q, 1e-10 ).empty() );
}

TEST( Oracle, DenseRank )
{
   EXPECT_EQ( dense_rank( { { 1, 1 }, { 2, 2 } }, 1e-10 ), 1 );
   std::vector<std::vector<Real>> id( 5, std::vector<Real>( 5, 0 ) );
   for( int i = 0; i < 5; ++i )
      id[i][i] = 1;
   EXPECT_EQ( dense_rank( id, 1e-10 ), 5 );
   EXPECT_EQ( dense_rank( { { 1, 2, 3 }, { 4, 5, 6 }, { 5, 7, 9 } }, 1e-10 ), 2 );
}

TEST( Kkt, MinXAtLeastOneChecks )
{
   auto lp = one_var( 1, kInf, 1 );
   PrimalDualSolution s;
   s.resize( 1, 0, 0 );
   s.x = { 1 };
   s.gamma = { 1 };
   EXPECT_TRUE( kkt_check( lp, s ).ok( 1e-12 ) );
   s.gamma = { 0 };
   auto rep = kkt_check( lp, s );
   EXPECT_NEAR( rep.dual, 0.5, 1e-12 );
   EXPECT_FALSE( rep.ok( 1e-6 ) );
}
