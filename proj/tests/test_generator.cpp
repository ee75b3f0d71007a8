#include "ahlp/generator/generator.hpp"

#include <gtest/gtest.h>

using namespace ahlp;

TEST( Generator, SameSeedBitIdentical )
{
   GenSpec s;
   s.seed = 77;
   s.duplicates = 0.2;
   s.singletons = 0.1;
   auto a = generate( s ), b = generate( s );
   EXPECT_EQ( a.problem, b.problem );
   EXPECT_EQ( nlohmann::json( a.manifest ).dump(), nlohmann::json( b.manifest ).dump() );
}

TEST( Generator, OutputValidAndInteriorFeasible )
{
   for( std::uint64_t seed = 1; seed <= 40; ++seed )
   {
      GenSpec s;
      s.seed = seed;
      s.blocks = 1 + seed % 8;
      s.duplicates = 0.1;
      s.singletons = 0.1;
      s.fixed = 0.05;
      s.empty = 0.05;
      s.dependent = 0.1;
      s.misplaced = 0.1;
      auto g = generate( s );
      ASSERT_TRUE( validate_arrowhead( g.problem ).empty() ) << seed;
      auto lp = assemble_monolithic( g.problem ).first;
      const auto& x = g.interior;
      for( Index j = 0; j < lp.ncols(); ++j )
      {
         EXPECT_LE( lp.l[j], x[j] );
         EXPECT_GE( lp.u[j], x[j] );
      }
      for( const auto& t : lp.A.triplets() )
         (void)t;
      std::vector<Real> ax( lp.neq(), 0 ), cx( lp.nineq(), 0 );
      for( const auto& t : lp.A.triplets() )
         ax[t.row] += t.val * x[t.col];
      for( const auto& t : lp.C.triplets() )
         cx[t.row] += t.val * x[t.col];
      for( Index i = 0; i < lp.neq(); ++i )
         EXPECT_NEAR( ax[i], lp.b[i], 1e-9 ) << lp.eq_names[i];
      for( Index i = 0; i < lp.nineq(); ++i )
      {
         EXPECT_LE( lp.d[i], cx[i] + 1e-9 ) << lp.ineq_names[i];
         EXPECT_GE( lp.f[i], cx[i] - 1e-9 ) << lp.ineq_names[i];
      }
   }
}

TEST( Generator, ManifestListsPlantedDuplicates )
{
   GenSpec s;
   s.rows = 20;
   s.duplicates = 0.1;
   auto g = generate( s );
   int pairs = 0;
   for( const auto& it : g.manifest.items )
      pairs += it.kind == "parallel_rows";
   EXPECT_EQ( pairs, 2 * s.blocks );
}

TEST( Generator, SingletonRowsStaySingletonsWithMisplacedItems )
{
   for( std::uint64_t seed = 1; seed <= 30; ++seed )
   {
      GenSpec s;
      s.seed = seed;
      s.blocks = 3;
      s.rows = 10;
      s.link_cols = 3;
      s.singletons = 0.3;
      s.misplaced = 0.3;
      auto g = generate( s );
      auto lp = assemble_monolithic( g.problem ).first;
      std::map<std::string, Index> nnz;
      for( Index i = 0; i < lp.neq(); ++i )
         nnz[lp.eq_names[i]] = static_cast<Index>( lp.A.row_cols( i ).size() );
      for( Index i = 0; i < lp.nineq(); ++i )
         nnz[lp.ineq_names[i]] = static_cast<Index>( lp.C.row_cols( i ).size() );
      for( const auto& it : g.manifest.items )
         if( it.kind == "singleton_row" )
            EXPECT_EQ( nnz.at( it.rows[0] ), 1 ) << "seed " << seed << " " << it.rows[0];
   }
}

TEST( Generator, ZeroFractionsGiveEmptyManifest )
{
   GenSpec s;
   auto g = generate( s );
   EXPECT_TRUE( g.manifest.items.empty() );
   EXPECT_EQ( g.manifest.planted_rows, 0 );
}

TEST( Generator, InvalidSpecRejected )
{
   GenSpec s;
   s.duplicates = 1.5;
   EXPECT_THROW( generate( s ), InvalidProblem );
}
