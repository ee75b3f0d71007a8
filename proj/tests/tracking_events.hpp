#ifndef AHLP_TESTS_TRACKING_EVENTS_HPP
#define AHLP_TESTS_TRACKING_EVENTS_HPP

#include "ahlp/presolve/workspace.hpp"
#include "ahlp/tracking/tracking.hpp"

#include <random>
#include <string>
#include <vector>

namespace ahlp::test
{

/// Applies random reductions to a workspace while keeping replicated data
/// identical on all ranks: replicated events draw from `shared`, which every
/// rank seeds identically.
struct EventDriver
{
   Workspace& ws;
   Tracking& t;
   std::mt19937_64 shared;
   std::mt19937_64 local;

   Real pick_inside( std::mt19937_64& rng, Real l, Real u )
   {
      if( is_finite( l ) && is_finite( u ) )
         return l + ( u - l ) * Real( rng() % 5 ) / 4;
      if( is_finite( l ) )
         return l + Real( rng() % 4 );
      if( is_finite( u ) )
         return u - Real( rng() % 4 );
      return Real( int( rng() % 9 ) - 4 );
   }

   void tighten( std::mt19937_64& rng, ColKey c )
   {
      auto& col = ws.col( c );
      const Real a = pick_inside( rng, col.lower, col.upper );
      const Real b = pick_inside( rng, col.lower, col.upper );
      Real nl = std::min( a, b ), nu = std::max( a, b );
      if( rng() % 3 == 0 )
         nl = col.lower;
      else if( rng() % 3 == 0 )
         nu = col.upper;
      t.on_bound_change( ws, c, col.lower, col.upper, nl, nu );
      col.lower = nl;
      col.upper = nu;
   }

   template <typename Pred>
   std::vector<RowKey> rows( RowScope s, Pred pred )
   {
      std::vector<RowKey> out;
      ws.for_rows( s, [&]( RowKey r ) {
         if( pred( r ) )
            out.push_back( r );
      } );
      return out;
   }

   std::vector<ColKey> cols( bool local_cols )
   {
      std::vector<ColKey> out;
      const auto& v = local_cols ? ws.local_cols : ws.link_cols;
      for( Index j = 0; j < static_cast<Index>( v.size() ); ++j )
         if( v[j].alive )
            out.push_back( local_cols ? ColKey::local( j ) : ColKey::link( j ) );
      return out;
   }

   void remove_entry( std::mt19937_64& rng, RowKey r, bool only_local_cols )
   {
      std::vector<RowEntry> es;
      ws.for_row_entries( r, [&]( ColKey c, Real v ) {
         if( !only_local_cols || c.is_local() )
            es.push_back( { c, v } );
      } );
      if( es.empty() )
         return;
      const auto& e = es[rng() % es.size()];
      t.on_entry_removed( ws, r, e.col, e.val );
      ws.erase_entry( r, e.col );
   }

   void step()
   {
      const int kind = static_cast<int>( shared() % 10 );
      switch( kind )
      {
      case 0: {
         auto cs = cols( false );
         if( !cs.empty() )
            tighten( shared, cs[shared() % cs.size()] );
         break;
      }
      case 1: {
         auto rs = rows( RowScope::Zero, []( RowKey ) { return true; } );
         if( !rs.empty() )
            remove_entry( shared, rs[shared() % rs.size()], false );
         break;
      }
      case 2: {
         if( shared() % 20 == 0 )
         {
            auto rs = rows( RowScope::Link, []( RowKey ) { return true; } );
            if( !rs.empty() )
            {
               auto r = rs[shared() % rs.size()];
               t.on_row_removed( ws, r );
               ws.row( r ).alive = false;
            }
         }
         break;
      }
      case 3: {
         if( shared() % 30 == 0 )
         {
            auto cs = cols( false );
            if( !cs.empty() )
            {
               auto c = cs[shared() % cs.size()];
               t.on_col_removed( ws, c );
               ws.col( c ).alive = false;
            }
         }
         break;
      }
      case 4:
      case 5: {
         auto cs = cols( true );
         if( !cs.empty() )
            tighten( local, cs[local() % cs.size()] );
         break;
      }
      case 6:
      case 7: {
         auto rs = rows( RowScope::Local, []( RowKey ) { return true; } );
         if( !rs.empty() )
            remove_entry( local, rs[local() % rs.size()], false );
         auto ls = rows( RowScope::Link, []( RowKey ) { return true; } );
         if( !ls.empty() )
            remove_entry( local, ls[local() % ls.size()], true );
         break;
      }
      case 8: {
         if( local() % 10 == 0 )
         {
            auto rs = rows( RowScope::Local, []( RowKey ) { return true; } );
            if( !rs.empty() )
            {
               auto r = rs[local() % rs.size()];
               t.on_row_removed( ws, r );
               ws.row( r ).alive = false;
            }
         }
         break;
      }
      default: {
         if( local() % 10 == 0 )
         {
            auto cs = cols( true );
            if( !cs.empty() )
            {
               auto c = cs[local() % cs.size()];
               t.on_col_removed( ws, c );
               ws.col( c ).alive = false;
            }
         }
         break;
      }
      }
   }
};

/// Compares the alive part of two tracking states; returns the first mismatch.
inline std::string diff_alive( const Workspace& ws, const Tracking& a, const Tracking& b )
{
   std::string out;
   ws.for_all_rows( [&]( RowKey r ) {
      if( !out.empty() )
         return;
      if( !( a.act( r ) == b.act( r ) ) || a.row_nnz( r ) != b.row_nnz( r ) )
         out = "row " + ws.row( r ).name;
   } );
   for( Index j = 0; j < static_cast<Index>( ws.link_cols.size() ) && out.empty(); ++j )
      if( ws.link_cols[j].alive && a.col_nnz( ColKey::link( j ) ) != b.col_nnz( ColKey::link( j ) ) )
         out = "link col " + ws.link_cols[j].name;
   for( Index j = 0; j < static_cast<Index>( ws.local_cols.size() ) && out.empty(); ++j )
      if( ws.local_cols[j].alive && a.col_nnz( ColKey::local( j ) ) != b.col_nnz( ColKey::local( j ) ) )
         out = "local col " + ws.local_cols[j].name;
   return out;
}

} // namespace ahlp::test

#endif
