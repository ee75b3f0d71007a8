#ifndef AHLP_GENERATOR_GENERATOR_HPP
#define AHLP_GENERATOR_GENERATOR_HPP

#include "ahlp/model/block_problem.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace ahlp
{

struct GenSpec
{
   std::uint64_t seed = 1;
   int blocks = 2;
   int rows = 10;       ///< local rows per block
   int cols = 10;       ///< local columns per block
   int link_rows = 2;
   int link_cols = 2;
   int zero_rows = 1;   ///< rows of A_0 / C_0
   double density = 0.3;
   double eq_fraction = 0.5;
   double duplicates = 0;  ///< fraction of rows per block
   double singletons = 0;  ///< fraction of rows per block
   double empty = 0;       ///< fraction of columns per block
   double fixed = 0;       ///< fraction of columns per block
   double dependent = 0;   ///< fraction of rows per block
   double misplaced = 0;   ///< fraction of rows / linking entities
   bool infeasible = false;
   double bound_range = 3;

   void check() const
   {
      for( double f : { duplicates, singletons, empty, fixed, dependent, misplaced, density, eq_fraction } )
         if( !( f >= 0 && f <= 1 ) )
            throw InvalidProblem( "generator fractions must lie in [0, 1]" );
      if( blocks < 1 || rows < 0 || cols < 1 || link_rows < 0 || link_cols < 0 || zero_rows < 0 )
         throw InvalidProblem( "generator sizes out of range" );
      if( !( bound_range > 0 ) )
         throw InvalidProblem( "bound range must be positive" );
   }
};

/// One planted redundancy. `rows` and `cols` hold names in the generated problem.
struct PlantedItem
{
   std::string kind; ///< parallel_rows, singleton_row, empty_col, fixed_col, dependent_row,
                     ///< misplaced_link_row, misplaced_local_row, misplaced_link_col,
                     ///< misplaced_local_col, infeasible
   std::string detector;
   std::vector<std::string> rows;
   std::vector<std::string> cols;
   double lambda = 0;
};

struct Manifest
{
   std::vector<PlantedItem> items;
   SizeCounts declared;
   std::int64_t planted_rows = 0;
   std::int64_t planted_cols = 0;
   std::int64_t planted_nonzeros = 0;
};

inline void to_json( nlohmann::json& j, const PlantedItem& p )
{
   j = { { "kind", p.kind }, { "detector", p.detector }, { "rows", p.rows }, { "cols", p.cols } };
   if( p.kind == "parallel_rows" )
      j["lambda"] = p.lambda;
}

inline void to_json( nlohmann::json& j, const Manifest& m )
{
   j = { { "items", m.items },
         { "declared", { { "nonzeros", m.declared.nonzeros }, { "rows", m.declared.rows }, { "cols", m.declared.cols } } },
         { "planted", { { "rows", m.planted_rows }, { "cols", m.planted_cols }, { "nonzeros", m.planted_nonzeros } } } };
}

struct Generated
{
   BlockProblem problem;
   BlockAssignment assignment;
   Manifest manifest;
   std::vector<Real> interior; ///< planted feasible point, monolithic column order
};

namespace detail
{

class GenRng
{
 public:
   explicit GenRng( std::uint64_t seed ) : eng_( seed ) {}
   std::uint64_t next() { return eng_(); }
   int uniform( int lo, int hi ) { return lo + static_cast<int>( next() % std::uint64_t( hi - lo + 1 ) ); }
   double unit() { return ( next() >> 11 ) * 0x1.0p-53; }
   bool chance( double p ) { return unit() < p; }
   Real coef() { Real v = uniform( 1, 5 ); return chance( 0.5 ) ? -v : v; }

 private:
   std::mt19937_64 eng_;
};

struct GenCol
{
   Real lower, upper, cost, star;
   std::string name;
};

struct GenRow
{
   int owner = 0; ///< 0 = A_0/C_0, b > 0 = local, kLinkOwner = linking
   bool eq = true;
   std::map<Index, Real> zero;
   std::map<std::pair<int, Index>, Real> local; ///< (block, column) -> value
   Real lhs = 0, rhs = 0;
   std::string name;
   bool pinned = false; ///< part of a planted item, never a host for later plantings

   std::size_t nnz() const { return zero.size() + local.size(); }
};

inline std::size_t blocks_touched( const GenRow& r )
{
   std::set<int> b;
   for( const auto& e : r.local )
      b.insert( e.first.first );
   return b.size();
}

} // namespace detail

/// Seeded synthetic arrowhead LP, feasible by construction: every row is built
/// around an interior point x*, every variable box contains x*, and cost signs
/// follow the finite bound so that the objective is bounded below.
inline Generated generate( const GenSpec& spec )
{
   using detail::GenCol;
   using detail::GenRow;
   spec.check();
   detail::GenRng rng( spec.seed );
   const int N = spec.blocks;
   Generated out;
   auto& man = out.manifest;

   auto make_col = [&]( const std::string& name ) {
      GenCol c;
      c.name = name;
      c.star = rng.uniform( -8, 8 ) * 0.5;
      const int kind = rng.uniform( 0, 9 );
      const Real lo = rng.uniform( 1, int( 2 * spec.bound_range ) ) * 0.5;
      const Real hi = rng.uniform( 1, int( 2 * spec.bound_range ) ) * 0.5;
      if( kind < 6 )
      {
         c.lower = c.star - lo;
         c.upper = c.star + hi;
         c.cost = rng.uniform( -5, 5 );
      }
      else if( kind < 8 )
      {
         c.lower = c.star - lo;
         c.upper = kInf;
         c.cost = rng.uniform( 0, 5 );
      }
      else if( kind < 9 )
      {
         c.lower = -kInf;
         c.upper = c.star + hi;
         c.cost = -rng.uniform( 0, 5 );
      }
      else
      {
         c.lower = -kInf;
         c.upper = kInf;
         c.cost = 0;
      }
      return c;
   };

   std::vector<GenCol> zcols;
   std::vector<std::vector<GenCol>> bcols( N + 1 );
   for( int j = 0; j < spec.link_cols; ++j )
      zcols.push_back( make_col( "x0_" + std::to_string( j ) ) );
   for( int b = 1; b <= N; ++b )
      for( int j = 0; j < spec.cols; ++j )
         bcols[b].push_back( make_col( "b" + std::to_string( b ) + "_x" + std::to_string( j ) ) );

   std::vector<GenRow> rows;
   auto activity = [&]( const GenRow& r ) {
      Real s = 0;
      for( auto& [j, v] : r.zero )
         s += v * zcols[j].star;
      for( auto& [k, v] : r.local )
         s += v * bcols[k.first][k.second].star;
      return s;
   };
   auto finish_row = [&]( GenRow& r ) {
      const Real act = activity( r );
      if( r.eq )
      {
         r.lhs = r.rhs = act;
         return;
      }
      const int kind = rng.uniform( 0, 2 );
      const Real s1 = rng.uniform( 0, 4 ) * 0.5;
      const Real s2 = rng.uniform( 0, 4 ) * 0.5;
      r.lhs = kind == 1 ? -kInf : act - s1;
      r.rhs = kind == 0 ? kInf : act + s2;
   };
   auto fill_local = [&]( GenRow& r, int b ) {
      for( Index j = 0; j < spec.cols; ++j )
         if( rng.chance( spec.density ) )
            r.local[{ b, j }] = rng.coef();
   };
   auto fill_zero = [&]( GenRow& r, double p ) {
      for( Index j = 0; j < spec.link_cols; ++j )
         if( rng.chance( p ) )
            r.zero[j] = rng.coef();
   };

   for( int k = 0; k < spec.zero_rows; ++k )
   {
      GenRow r;
      r.owner = 0;
      r.eq = rng.chance( spec.eq_fraction );
      r.name = "z_r" + std::to_string( k );
      fill_zero( r, std::max( spec.density, 0.5 ) );
      if( r.zero.empty() && spec.link_cols > 0 )
         r.zero[rng.uniform( 0, spec.link_cols - 1 )] = rng.coef();
      if( !r.zero.empty() )
         rows.push_back( std::move( r ) );
   }
   for( int b = 1; b <= N; ++b )
      for( int k = 0; k < spec.rows; ++k )
      {
         GenRow r;
         r.owner = b;
         r.eq = rng.chance( spec.eq_fraction );
         r.name = "b" + std::to_string( b ) + "_r" + std::to_string( k );
         fill_local( r, b );
         fill_zero( r, spec.density / 2 );
         while( r.local.size() < 2 && static_cast<int>( r.local.size() ) < spec.cols )
            r.local[{ b, rng.uniform( 0, spec.cols - 1 ) }] = rng.coef();
         rows.push_back( std::move( r ) );
      }
   for( int k = 0; k < spec.link_rows; ++k )
   {
      GenRow r;
      r.owner = kLinkOwner;
      r.eq = rng.chance( spec.eq_fraction );
      r.name = "l_r" + std::to_string( k );
      for( int b = 1; b <= N; ++b )
         fill_local( r, b );
      fill_zero( r, spec.density / 2 );
      auto blocks_hit = [&] {
         std::vector<char> hit( N + 1, 0 );
         for( auto& [key, v] : r.local )
            hit[key.first] = 1;
         int n = 0;
         for( char h : hit )
            n += h;
         return std::pair{ n, hit };
      };
      for( int guard = 0; blocks_hit().first < std::min( 2, N ) && guard < 100; ++guard )
      {
         const int b = rng.uniform( 1, N );
         r.local[{ b, rng.uniform( 0, spec.cols - 1 ) }] = rng.coef();
      }
      rows.push_back( std::move( r ) );
   }

   // every local column needs a local row entry, every linking column entries in two blocks
   std::vector<std::vector<Index>> block_rows( N + 1 );
   for( Index i = 0; i < static_cast<Index>( rows.size() ); ++i )
      if( rows[i].owner > 0 )
         block_rows[rows[i].owner].push_back( i );
   for( int b = 1; b <= N; ++b )
   {
      if( block_rows[b].empty() )
         continue;
      for( Index j = 0; j < spec.cols; ++j )
      {
         bool has = false;
         for( Index i : block_rows[b] )
            has = has || rows[i].local.count( { b, j } );
         if( !has )
            rows[block_rows[b][rng.uniform( 0, int( block_rows[b].size() ) - 1 )]].local[{ b, j }] = rng.coef();
      }
   }
   for( Index j = 0; j < spec.link_cols; ++j )
   {
      auto blocks_with = [&] {
         std::vector<char> hit( N + 1, 0 );
         for( const auto& r : rows )
            if( r.owner > 0 && r.zero.count( j ) )
               hit[r.owner] = 1;
         int n = 0;
         for( char h : hit )
            n += h;
         return n;
      };
      for( int guard = 0; blocks_with() < std::min( 2, N ) && guard < 100; ++guard )
      {
         const int b = rng.uniform( 1, N );
         if( !block_rows[b].empty() )
            rows[block_rows[b][rng.uniform( 0, int( block_rows[b].size() ) - 1 )]].zero[j] = rng.coef();
      }
   }
   for( auto& r : rows )
      finish_row( r );

   auto count_of = [&]( double frac, int base ) { return static_cast<int>( std::lround( frac * base ) ); };
   auto add_item = [&]( std::string kind, std::string detector, std::vector<std::string> rs,
                        std::vector<std::string> cs, double lambda = 0 ) {
      man.items.push_back( { std::move( kind ), std::move( detector ), std::move( rs ), std::move( cs ), lambda } );
   };
   std::map<int, int> planted_seq;
   auto planted_name = [&]( int b, const char* what ) {
      return ( b > 0 ? "b" + std::to_string( b ) : std::string( "l" ) ) + "_" + what + std::to_string( planted_seq[b]++ );
   };

   const std::size_t base_rows = rows.size();
   for( int b = 1; b <= N; ++b )
   {
      std::vector<Index> own;
      for( Index i = 0; i < static_cast<Index>( base_rows ); ++i )
         if( rows[i].owner == b )
            own.push_back( i );
      if( own.empty() )
         continue;

      for( int k = 0; k < count_of( spec.duplicates, spec.rows ); ++k )
      {
         const Index src_index = own[rng.uniform( 0, int( own.size() ) - 1 )];
         const GenRow& src = rows[src_index];
         static constexpr Real lambdas[] = { 2, -1, 0.5, 3, -2 };
         const Real lam = lambdas[rng.uniform( 0, 4 )];
         GenRow r = src;
         r.name = planted_name( b, "dup" );
         for( auto& [j, v] : r.zero )
            v *= lam;
         for( auto& [j, v] : r.local )
            v *= lam;
         if( r.eq )
            r.lhs = r.rhs = src.lhs * lam;
         else
         {
            Real lo = src.lhs * lam, hi = src.rhs * lam;
            if( lam < 0 )
               std::swap( lo, hi );
            const Real act = activity( r );
            const Real widen = rng.uniform( 0, 2 ) * 0.5;
            r.lhs = is_finite( lo ) ? std::min( lo, act ) - widen : -kInf;
            r.rhs = is_finite( hi ) ? std::max( hi, act ) + widen : kInf;
         }
         r.pinned = true;
         rows[src_index].pinned = true;
         add_item( "parallel_rows", "parallel", { src.name, r.name }, {}, lam );
         man.planted_rows += 1;
         man.planted_nonzeros += r.nnz();
         rows.push_back( std::move( r ) );
      }

      for( int k = 0; k < count_of( spec.singletons, spec.rows ); ++k )
      {
         GenRow r;
         r.owner = b;
         r.eq = rng.chance( 0.5 );
         r.name = planted_name( b, "sgl" );
         const Index j = rng.uniform( 0, spec.cols - 1 );
         r.local[{ b, j }] = rng.coef();
         if( r.eq )
            finish_row( r );
         else
         {
            const Real act = activity( r );
            r.lhs = act - rng.uniform( 1, 6 ) * 0.5;
            r.rhs = rng.chance( 0.5 ) ? kInf : act + rng.uniform( 1, 6 ) * 0.5;
         }
         r.pinned = true;
         add_item( "singleton_row", "singleton_row", { r.name }, { bcols[b][j].name } );
         man.planted_rows += 1;
         man.planted_nonzeros += 1;
         rows.push_back( std::move( r ) );
      }

      std::vector<Index> eqs;
      for( Index i : own )
         if( rows[i].eq )
            eqs.push_back( i );
      for( int k = 0; k < count_of( spec.dependent, spec.rows ) && eqs.size() >= 2; ++k )
      {
         const int p = rng.uniform( 0, int( eqs.size() ) - 1 );
         int q = rng.uniform( 0, int( eqs.size() ) - 2 );
         q += q >= p;
         const GenRow& r1 = rows[eqs[p]];
         const GenRow& r2 = rows[eqs[q]];
         GenRow r = r1;
         r.name = planted_name( b, "dep" );
         for( auto& [j, v] : r2.zero )
            r.zero[j] += v;
         for( auto& [j, v] : r2.local )
            r.local[j] += v;
         std::erase_if( r.zero, []( const auto& e ) { return e.second == 0; } );
         std::erase_if( r.local, []( const auto& e ) { return e.second == 0; } );
         if( r.local.empty() )
            continue;
         r.lhs = r.rhs = r1.lhs + r2.lhs;
         r.pinned = rows[eqs[p]].pinned = rows[eqs[q]].pinned = true;
         add_item( "dependent_row", "lin_dependencies", { r.name, r1.name, r2.name }, {} );
         man.planted_rows += 1;
         man.planted_nonzeros += r.nnz();
         rows.push_back( std::move( r ) );
      }
   }

   std::vector<std::pair<int, Index>> extra_cols; // planted local columns
   for( int b = 1; b <= N; ++b )
   {
      for( int k = 0; k < count_of( spec.empty, spec.cols ); ++k )
      {
         GenCol c = make_col( planted_name( b, "empty" ) );
         if( c.cost > 0 && !is_finite( c.lower ) )
            c.cost = 0;
         if( c.cost < 0 && !is_finite( c.upper ) )
            c.cost = 0;
         bcols[b].push_back( c );
         add_item( "empty_col", "model_cleanup", {}, { c.name } );
         man.planted_cols += 1;
      }
      for( int k = 0; k < count_of( spec.fixed, spec.cols ); ++k )
      {
         GenCol c = make_col( planted_name( b, "fix" ) );
         c.lower = c.upper = c.star;
         bcols[b].push_back( c );
         const Index j = static_cast<Index>( bcols[b].size() ) - 1;
         std::vector<Index> own;
         for( Index i = 0; i < static_cast<Index>( rows.size() ); ++i )
            if( rows[i].owner == b && rows[i].local.size() >= 2 )
               own.push_back( i );
         int hits = 0;
         for( Index i : own )
            if( rng.chance( spec.density ) && hits < 3 )
            {
               const Real v = rng.coef();
               rows[i].local[{ b, j }] = v;
               if( rows[i].eq )
                  rows[i].lhs = rows[i].rhs = rows[i].lhs + v * c.star;
               else
               {
                  if( is_finite( rows[i].lhs ) )
                     rows[i].lhs += v * c.star;
                  if( is_finite( rows[i].rhs ) )
                     rows[i].rhs += v * c.star;
               }
               ++hits;
            }
         add_item( "fixed_col", "vars_fixation", {}, { c.name } );
         man.planted_cols += 1;
         man.planted_nonzeros += hits;
      }
   }

   if( spec.misplaced > 0 )
   {
      const int k = std::max( 1, count_of( spec.misplaced, spec.rows ) );
      for( int t = 0; t < k; ++t )
      {
         // linking row populated in a single block
         const int b = rng.uniform( 1, N );
         GenRow r;
         r.owner = kLinkOwner;
         r.eq = rng.chance( spec.eq_fraction );
         r.name = planted_name( 0, "mis" );
         fill_local( r, b );
         if( r.local.empty() )
            r.local[{ b, rng.uniform( 0, spec.cols - 1 ) }] = rng.coef();
         finish_row( r );
         r.pinned = true;
         add_item( "misplaced_link_row", "permute", { r.name }, {} );
         rows.push_back( std::move( r ) );

         // local row without local columns
         if( spec.link_cols > 0 )
         {
            GenRow z;
            z.owner = b;
            z.eq = rng.chance( spec.eq_fraction );
            z.name = planted_name( b, "mis" );
            fill_zero( z, 0.5 );
            if( z.zero.empty() )
               z.zero[rng.uniform( 0, spec.link_cols - 1 )] = rng.coef();
            finish_row( z );
            z.pinned = true;
            add_item( "misplaced_local_row", "permute", { z.name }, {} );
            rows.push_back( std::move( z ) );
         }

         // linking column used by a single block
         std::vector<Index> brows;
         for( Index i = 0; i < static_cast<Index>( rows.size() ); ++i )
            if( rows[i].owner == b && !rows[i].local.empty() && !rows[i].pinned )
               brows.push_back( i );
         if( !brows.empty() )
         {
            GenCol c = make_col( "x0_mis" + std::to_string( t ) );
            zcols.push_back( c );
            const Index j = static_cast<Index>( zcols.size() ) - 1;
            GenRow& host = rows[brows[rng.uniform( 0, int( brows.size() ) - 1 )]];
            const Real v = rng.coef();
            host.zero[j] = v;
            if( host.eq )
               host.lhs = host.rhs = host.lhs + v * c.star;
            else
            {
               if( is_finite( host.lhs ) )
                  host.lhs += v * c.star;
               if( is_finite( host.rhs ) )
                  host.rhs += v * c.star;
            }
            add_item( "misplaced_link_col", "permute", {}, { c.name } );
         }

         // local column that only appears in linking rows
         std::vector<Index> lrows;
         for( Index i = 0; i < static_cast<Index>( rows.size() ); ++i )
            if( rows[i].owner == kLinkOwner && !rows[i].pinned && blocks_touched( rows[i] ) >= 2 )
               lrows.push_back( i );
         if( !lrows.empty() )
         {
            GenCol c = make_col( planted_name( b, "mcol" ) );
            bcols[b].push_back( c );
            const Index j = static_cast<Index>( bcols[b].size() ) - 1;
            GenRow& host = rows[lrows[rng.uniform( 0, int( lrows.size() ) - 1 )]];
            const Real v = rng.coef();
            host.local[{ b, j }] = v;
            if( host.eq )
               host.lhs = host.rhs = host.lhs + v * c.star;
            else
            {
               if( is_finite( host.lhs ) )
                  host.lhs += v * c.star;
               if( is_finite( host.rhs ) )
                  host.rhs += v * c.star;
            }
            add_item( "misplaced_local_col", "permute", {}, { c.name } );
         }
      }
   }

   if( spec.infeasible )
   {
      int b = 1;
      Index j = -1;
      for( Index k = 0; k < static_cast<Index>( bcols[b].size() ); ++k )
         if( is_finite( bcols[b][k].upper ) )
         {
            j = k;
            break;
         }
      if( j < 0 )
      {
         bcols[b][0].upper = bcols[b][0].star + 1;
         if( bcols[b][0].cost < 0 && !is_finite( bcols[b][0].lower ) )
            bcols[b][0].cost = 0;
         j = 0;
      }
      GenRow r;
      r.owner = b;
      r.eq = true;
      r.name = planted_name( b, "inf" );
      const Real a = rng.coef();
      r.local[{ b, j }] = a;
      r.lhs = r.rhs = a * ( bcols[b][j].upper + 1 );
      add_item( "infeasible", "singleton_row", { r.name }, { bcols[b][j].name } );
      rows.push_back( std::move( r ) );
   }

   // assemble the block problem
   BlockProblem& p = out.problem;
   p.num_blocks = N;
   p.objective_offset = rng.uniform( -3, 3 );
   for( const auto& c : zcols )
      p.zero.vars.push( c.lower, c.upper, c.cost, c.name );
   p.blocks.resize( N );
   for( int b = 1; b <= N; ++b )
   {
      p.blocks[b - 1].id = b;
      for( const auto& c : bcols[b] )
         p.blocks[b - 1].vars.push( c.lower, c.upper, c.cost, c.name );
   }
   const Index n0 = static_cast<Index>( zcols.size() );
   std::vector<Triplet> a0, c0, f0, g0;
   std::vector<std::vector<Triplet>> A( N + 1 ), B( N + 1 ), C( N + 1 ), D( N + 1 ), F( N + 1 ), G( N + 1 );
   for( const auto& r : rows )
   {
      man.declared.nonzeros += r.nnz();
      man.declared.rows += 1;
      if( r.owner == 0 )
      {
         auto& m = r.eq ? a0 : c0;
         const Index i = r.eq ? p.zero.eq0.size() : p.zero.ineq0.size();
         for( auto& [j, v] : r.zero )
            m.push_back( { i, j, v } );
         if( r.eq )
         {
            p.zero.eq0.rhs.push_back( r.lhs );
            p.zero.eq0.names.push_back( r.name );
         }
         else
         {
            p.zero.ineq0.lower.push_back( r.lhs );
            p.zero.ineq0.upper.push_back( r.rhs );
            p.zero.ineq0.names.push_back( r.name );
         }
      }
      else if( r.owner == kLinkOwner )
      {
         auto& m = r.eq ? f0 : g0;
         const Index i = r.eq ? p.zero.link_eq.size() : p.zero.link_ineq.size();
         for( auto& [j, v] : r.zero )
            m.push_back( { i, j, v } );
         for( auto& [k, v] : r.local )
            ( r.eq ? F : G )[k.first].push_back( { i, k.second, v } );
         if( r.eq )
         {
            p.zero.link_eq.rhs.push_back( r.lhs );
            p.zero.link_eq.names.push_back( r.name );
         }
         else
         {
            p.zero.link_ineq.lower.push_back( r.lhs );
            p.zero.link_ineq.upper.push_back( r.rhs );
            p.zero.link_ineq.names.push_back( r.name );
         }
      }
      else
      {
         auto& blk = p.blocks[r.owner - 1];
         const Index i = r.eq ? blk.eq.size() : blk.ineq.size();
         for( auto& [j, v] : r.zero )
            ( r.eq ? A : C )[r.owner].push_back( { i, j, v } );
         for( auto& [k, v] : r.local )
            ( r.eq ? B : D )[r.owner].push_back( { i, k.second, v } );
         if( r.eq )
         {
            blk.eq.rhs.push_back( r.lhs );
            blk.eq.names.push_back( r.name );
         }
         else
         {
            blk.ineq.lower.push_back( r.lhs );
            blk.ineq.upper.push_back( r.rhs );
            blk.ineq.names.push_back( r.name );
         }
      }
   }
   auto& z = p.zero;
   z.A0 = SparseMatrix::from_triplets( z.eq0.size(), n0, std::move( a0 ) );
   z.C0 = SparseMatrix::from_triplets( z.ineq0.size(), n0, std::move( c0 ) );
   z.F0 = SparseMatrix::from_triplets( z.link_eq.size(), n0, std::move( f0 ) );
   z.G0 = SparseMatrix::from_triplets( z.link_ineq.size(), n0, std::move( g0 ) );
   for( int b = 1; b <= N; ++b )
   {
      auto& blk = p.blocks[b - 1];
      const Index nb = blk.vars.size();
      blk.A = SparseMatrix::from_triplets( blk.eq.size(), n0, std::move( A[b] ) );
      blk.B = SparseMatrix::from_triplets( blk.eq.size(), nb, std::move( B[b] ) );
      blk.C = SparseMatrix::from_triplets( blk.ineq.size(), n0, std::move( C[b] ) );
      blk.D = SparseMatrix::from_triplets( blk.ineq.size(), nb, std::move( D[b] ) );
      blk.F = SparseMatrix::from_triplets( z.link_eq.size(), nb, std::move( F[b] ) );
      blk.G = SparseMatrix::from_triplets( z.link_ineq.size(), nb, std::move( G[b] ) );
   }
   man.declared.cols = n0;
   for( int b = 1; b <= N; ++b )
      man.declared.cols += static_cast<std::int64_t>( bcols[b].size() );

   for( const auto& c : zcols )
      out.interior.push_back( c.star );
   for( int b = 1; b <= N; ++b )
      for( const auto& c : bcols[b] )
         out.interior.push_back( c.star );
   out.assignment = assemble_monolithic( p ).second;
   return out;
}

} // namespace ahlp

#endif
