#ifndef AHLP_TRACKING_TRACKING_HPP
#define AHLP_TRACKING_TRACKING_HPP

#include "ahlp/comm/communicator.hpp"
#include "ahlp/presolve/workspace.hpp"
#include "ahlp/tracking/exact_sum.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ahlp
{

/// Row activity bounds split into an exact finite part and counters of
/// infinite contributions:
///   actmin = sum_{a>0} a*l_j + sum_{a<0} a*u_j,
///   actmax = sum_{a>0} a*u_j + sum_{a<0} a*l_j.
struct ActivityRecord
{
   ExactSum min_fin;
   ExactSum max_fin;
   std::int64_t min_inf = 0;
   std::int64_t max_inf = 0;

   Real min() const { return min_inf > 0 ? -kInf : min_fin.value(); }
   Real max() const { return max_inf > 0 ? kInf : max_fin.value(); }

   /// Adds (sign = +1) or removes (sign = -1) the contribution of a*x, x in [l, u].
   void account( Real a, Real l, Real u, int sign )
   {
      const Real lo = a > 0 ? l : u;
      const Real hi = a > 0 ? u : l;
      if( is_finite( lo ) )
         sign > 0 ? min_fin.add( a * lo ) : min_fin.subtract( a * lo );
      else
         min_inf += sign;
      if( is_finite( hi ) )
         sign > 0 ? max_fin.add( a * hi ) : max_fin.subtract( a * hi );
      else
         max_inf += sign;
   }

   /// Minimum activity of the row without the a*x_j term (x_j in [l, u]).
   Real residual_min( Real a, Real l, Real u ) const
   {
      const Real lo = a > 0 ? l : u;
      if( !is_finite( lo ) )
         return min_inf == 1 ? min_fin.value() : -kInf;
      if( min_inf > 0 )
         return -kInf;
      ExactSum s = min_fin;
      s.subtract( a * lo );
      return s.value();
   }

   Real residual_max( Real a, Real l, Real u ) const
   {
      const Real hi = a > 0 ? u : l;
      if( !is_finite( hi ) )
         return max_inf == 1 ? max_fin.value() : kInf;
      if( max_inf > 0 )
         return kInf;
      ExactSum s = max_fin;
      s.subtract( a * hi );
      return s.value();
   }

   ActivityRecord& operator+=( const ActivityRecord& o )
   {
      min_fin += o.min_fin;
      max_fin += o.max_fin;
      min_inf += o.min_inf;
      max_inf += o.max_inf;
      return *this;
   }
   friend ActivityRecord operator+( ActivityRecord a, const ActivityRecord& b ) { return a += b; }
   bool operator==( const ActivityRecord& ) const = default;
};

/// Deltas of linking quantities accumulated since the last synchronization.
struct LinkBuffer
{
   std::vector<ActivityRecord> act;     ///< per linking row
   std::vector<std::int64_t> row_nnz;   ///< per linking row
   std::vector<std::int64_t> col_nnz;   ///< per linking column
   std::vector<ExactSum> side_shift;    ///< per linking row, subtracted from lhs/rhs

   bool empty() const
   {
      const ActivityRecord zero;
      for( const auto& a : act )
         if( !( a == zero ) )
            return false;
      for( auto v : row_nnz )
         if( v )
            return false;
      for( auto v : col_nnz )
         if( v )
            return false;
      for( const auto& s : side_shift )
         if( !s.is_zero() )
            return false;
      return true;
   }
};

/// Activities and nonzero counters of a rank's workspace.
///
/// Zero rows and local rows are updated in place. Linking rows and linking
/// column counters hold the last synchronized global value; changes are
/// buffered and summed over ranks in sync_linking(). A change that every rank
/// applies identically (it stems from replicated data, e.g. an x_0 entry of a
/// linking row) is buffered by rank 0 only, so it is counted once.
class Tracking
{
 public:
   std::vector<ActivityRecord> zero_act, link_act, local_act;
   std::vector<std::int64_t> zero_nnz, link_nnz, local_nnz;
   std::vector<std::int64_t> link_col_nnz, local_col_nnz;
   LinkBuffer buffer;
   std::vector<char> link_col_dirty; ///< bounds changed since the last sync

   /// Recomputes everything from the workspace (collective).
   static Tracking compute_from_scratch( const Workspace& ws, Communicator& comm )
   {
      Tracking t;
      t.fit( ws );
      const bool root = comm.rank() == 0;
      for( RowScope s : { RowScope::Zero, RowScope::Local } )
         ws.for_rows( s, [&]( RowKey r ) {
            auto& rec = t.act( r );
            auto& cnt = t.row_nnz( r );
            ws.for_row_entries( r, [&]( ColKey c, Real a ) {
               const auto& col = ws.col( c );
               rec.account( a, col.lower, col.upper, +1 );
               ++cnt;
            } );
         } );
      std::vector<ActivityRecord> lact( ws.link_rows.size() );
      std::vector<std::int64_t> lcnt( ws.link_rows.size() + ws.link_cols.size(), 0 );
      ws.for_rows( RowScope::Link, [&]( RowKey r ) {
         ws.for_row_entries( r, [&]( ColKey c, Real a ) {
            if( c.is_link() && !root )
               return;
            const auto& col = ws.col( c );
            lact[r.index()].account( a, col.lower, col.upper, +1 );
            ++lcnt[r.index()];
         } );
      } );
      const std::size_t off = ws.link_rows.size();
      for( Index j = 0; j < static_cast<Index>( ws.link_cols.size() ); ++j )
         if( ws.link_cols[j].alive )
            ws.for_col_entries( ColKey::link( j ), [&]( RowKey r, Real ) {
               if( r.scope() == RowScope::Local || root )
                  ++lcnt[off + j];
            } );
      for( Index j = 0; j < static_cast<Index>( ws.local_cols.size() ); ++j )
         if( ws.local_cols[j].alive )
            ws.for_col_entries( ColKey::local( j ), [&]( RowKey, Real ) { ++t.local_col_nnz[j]; } );

      const std::string tag = layout_tag( ws );
      t.link_act = comm.allreduce( lact, ops::sum<ActivityRecord>(), tag );
      auto g = comm.allreduce( lcnt, ops::sum<std::int64_t>(), tag );
      for( std::size_t i = 0; i < off; ++i )
         t.link_nnz[i] = g[i];
      for( std::size_t j = 0; j < ws.link_cols.size(); ++j )
         t.link_col_nnz[j] = g[off + j];
      return t;
   }

   /// Grows every per-entity array to the workspace size.
   void fit( const Workspace& ws )
   {
      zero_act.resize( ws.zero_rows.size() );
      link_act.resize( ws.link_rows.size() );
      local_act.resize( ws.local_rows.size() );
      zero_nnz.resize( ws.zero_rows.size(), 0 );
      link_nnz.resize( ws.link_rows.size(), 0 );
      local_nnz.resize( ws.local_rows.size(), 0 );
      link_col_nnz.resize( ws.link_cols.size(), 0 );
      local_col_nnz.resize( ws.local_cols.size(), 0 );
      link_col_dirty.resize( ws.link_cols.size(), 0 );
      buffer.act.resize( ws.link_rows.size() );
      buffer.row_nnz.resize( ws.link_rows.size(), 0 );
      buffer.side_shift.resize( ws.link_rows.size() );
      buffer.col_nnz.resize( ws.link_cols.size(), 0 );
   }

   ActivityRecord& act( RowKey r )
   {
      return r.scope() == RowScope::Zero ? zero_act[r.index()]
             : r.scope() == RowScope::Link ? link_act[r.index()]
                                             : local_act[r.index()];
   }
   const ActivityRecord& act( RowKey r ) const { return const_cast<Tracking*>( this )->act( r ); }

   std::int64_t& row_nnz( RowKey r )
   {
      return r.scope() == RowScope::Zero ? zero_nnz[r.index()]
             : r.scope() == RowScope::Link ? link_nnz[r.index()]
                                             : local_nnz[r.index()];
   }
   std::int64_t row_nnz( RowKey r ) const { return const_cast<Tracking*>( this )->row_nnz( r ); }

   std::int64_t col_nnz( ColKey c ) const
   {
      return c.is_link() ? link_col_nnz[c.index()] : local_col_nnz[c.index()];
   }

   /// Bounds of column `c` change from [ol, ou] to [nl, nu]; the workspace may
   /// hold either value. Only tightening is legal.
   void on_bound_change( const Workspace& ws, ColKey c, Real ol, Real ou, Real nl, Real nu )
   {
      if( nl < ol || nu > ou )
         throw ContractViolation( "bound widening on column " + ws.col( c ).name );
      if( c.is_link() )
         link_col_dirty[c.index()] = 1;
      ws.for_col_entries( c, [&]( RowKey r, Real a ) {
         ActivityRecord* rec = row_target( ws, r, c );
         if( !rec )
            return;
         rec->account( a, ol, ou, -1 );
         rec->account( a, nl, nu, +1 );
      } );
   }

   /// Entry (r, c) with value a is about to be deleted; both r and c are alive.
   void on_entry_removed( const Workspace& ws, RowKey r, ColKey c, Real a )
   {
      const auto& col = ws.col( c );
      if( ActivityRecord* rec = row_target( ws, r, c ) )
      {
         rec->account( a, col.lower, col.upper, -1 );
         *row_count_target( ws, r, c ) -= 1;
      }
      if( auto* cnt = col_count_target( ws, r, c ) )
         *cnt -= 1;
   }

   /// Row r is about to be deleted.
   void on_row_removed( const Workspace& ws, RowKey r )
   {
      ws.for_row_entries( r, [&]( ColKey c, Real ) {
         if( auto* cnt = col_count_target( ws, r, c ) )
            *cnt -= 1;
      } );
   }

   /// Column c is about to be deleted.
   void on_col_removed( const Workspace& ws, ColKey c )
   {
      const auto& col = ws.col( c );
      ws.for_col_entries( c, [&]( RowKey r, Real a ) {
         if( ActivityRecord* rec = row_target( ws, r, c ) )
         {
            rec->account( a, col.lower, col.upper, -1 );
            *row_count_target( ws, r, c ) -= 1;
         }
      } );
   }

   /// Row r was just appended to the workspace.
   void on_row_added( const Workspace& ws, RowKey r )
   {
      fit( ws );
      ws.for_row_entries( r, [&]( ColKey c, Real a ) {
         if( ActivityRecord* rec = row_target( ws, r, c ) )
         {
            const auto& col = ws.col( c );
            rec->account( a, col.lower, col.upper, +1 );
            *row_count_target( ws, r, c ) += 1;
         }
         if( auto* cnt = col_count_target( ws, r, c ) )
            *cnt += 1;
      } );
   }

   /// Column c was just appended to the workspace.
   void on_col_added( const Workspace& ws, ColKey c )
   {
      fit( ws );
      const auto& col = ws.col( c );
      ws.for_col_entries( c, [&]( RowKey r, Real a ) {
         if( ActivityRecord* rec = row_target( ws, r, c ) )
         {
            rec->account( a, col.lower, col.upper, +1 );
            *row_count_target( ws, r, c ) += 1;
         }
         if( auto* cnt = col_count_target( ws, r, c ) )
            *cnt += 1;
      } );
   }

   /// Buffers a shift of both sides of linking row `i` by -delta.
   void shift_link_row( Index i, Real delta ) { buffer.side_shift[i].add( delta ); }

   /// Folds all buffers into the global linking records and applies the
   /// buffered side shifts to the workspace (collective).
   void sync_linking( Workspace& ws, Communicator& comm )
   {
      fit( ws );
      const std::string tag = layout_tag( ws );
      auto act_delta = comm.allreduce( buffer.act, ops::sum<ActivityRecord>(), tag );
      auto shift = comm.allreduce( buffer.side_shift, ops::sum<ExactSum>(), tag );
      std::vector<std::int64_t> counts = buffer.row_nnz;
      counts.insert( counts.end(), buffer.col_nnz.begin(), buffer.col_nnz.end() );
      counts = comm.allreduce( counts, ops::sum<std::int64_t>(), tag );
      for( std::size_t i = 0; i < ws.link_rows.size(); ++i )
      {
         link_act[i] += act_delta[i];
         link_nnz[i] += counts[i];
         if( !shift[i].is_zero() )
         {
            auto& row = ws.link_rows[i];
            const Real d = shift[i].value();
            if( is_finite( row.lhs ) )
               row.lhs -= d;
            if( is_finite( row.rhs ) )
               row.rhs = row.equality ? row.lhs : row.rhs - d;
         }
      }
      for( std::size_t j = 0; j < ws.link_cols.size(); ++j )
         link_col_nnz[j] += counts[ws.link_rows.size() + j];
      buffer.act.assign( ws.link_rows.size(), ActivityRecord{} );
      buffer.row_nnz.assign( ws.link_rows.size(), 0 );
      buffer.side_shift.assign( ws.link_rows.size(), ExactSum{} );
      buffer.col_nnz.assign( ws.link_cols.size(), 0 );
      link_col_dirty.assign( ws.link_cols.size(), 0 );
   }

   static std::string layout_tag( const Workspace& ws )
   {
      return "link-sync:" + std::to_string( ws.link_rows.size() ) + "x" + std::to_string( ws.link_cols.size() );
   }

   /// Records and counters only; buffers are ignored.
   bool same_state( const Tracking& o ) const
   {
      return zero_act == o.zero_act && link_act == o.link_act && local_act == o.local_act &&
             zero_nnz == o.zero_nnz && link_nnz == o.link_nnz && local_nnz == o.local_nnz &&
             link_col_nnz == o.link_col_nnz && local_col_nnz == o.local_col_nnz;
   }

 private:
   /// Where a change of entry (r, c) lands for the row record: in place for
   /// zero/local rows, in the buffer for linking rows, or nowhere when another
   /// rank accounts for it.
   ActivityRecord* row_target( const Workspace& ws, RowKey r, ColKey c )
   {
      if( r.scope() != RowScope::Link )
         return &act( r );
      if( c.is_link() && ws.rank != 0 )
         return nullptr;
      return &buffer.act[r.index()];
   }

   std::int64_t* row_count_target( const Workspace&, RowKey r, ColKey )
   {
      if( r.scope() != RowScope::Link )
         return &row_nnz( r );
      return &buffer.row_nnz[r.index()];
   }

   std::int64_t* col_count_target( const Workspace& ws, RowKey r, ColKey c )
   {
      if( c.is_local() )
         return &local_col_nnz[c.index()];
      if( r.replicated() && ws.rank != 0 )
         return nullptr;
      return &buffer.col_nnz[c.index()];
   }
};

} // namespace ahlp

#endif
