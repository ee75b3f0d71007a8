#ifndef AHLP_POSTSOLVE_POSTSOLVE_HPP
#define AHLP_POSTSOLVE_POSTSOLVE_HPP

#include "ahlp/comm/communicator.hpp"
#include "ahlp/postsolve/solution.hpp"
#include "ahlp/postsolve/stack.hpp"

#include <cmath>
#include <unordered_map>

namespace ahlp
{

/// Values of one rank after replay. Vectors are indexed by global id and
/// already summed over ranks.
struct RecoveredValues
{
   std::vector<Real> x;
   std::vector<Real> rc; ///< reduced costs c - A'y
   std::vector<Real> y;  ///< row multipliers, equality rows first
};

namespace detail
{

   /// Reverse replay of one rank's stack.
   class Replay
   {
    public:
      Replay( const RankStack& st, Communicator& comm, const std::unordered_map<std::int64_t, Real>& x,
              const std::unordered_map<std::int64_t, Real>& y )
          : st_( st ), comm_( comm ), root_( comm.rank() == 0 )
      {
         for( const auto& c : st.snapshot_cols )
            cols_[c.gid] = { c.link, false, 0, c.cost, {} };
         for( const auto& r : st.snapshot_rows )
         {
            rows_[r.gid] = { r.replicated, false, 0 };
            for( const auto& e : r.entries )
               col_at( e.gid ).rows.push_back( { r.gid, e.val } );
         }
         for( const auto& e : st.entries )
            register_payload( e );
         for( const auto& c : st.final_cols )
         {
            auto& col = col_at( c.gid );
            col.active = true;
            col.link = c.link;
            col.cost = c.cost;
            col.x = lookup( x, c.gid, "column" );
         }
         for( const auto& r : st.final_rows )
         {
            auto& row = rows_[r.gid];
            row.active = true;
            row.replicated = r.replicated;
            row.y = lookup( y, r.gid, "row" );
         }
      }

      RecoveredValues run()
      {
         for( auto it = st_.entries.rbegin(); it != st_.entries.rend(); ++it )
            std::visit( [this]( const auto& e ) { undo( e ); }, *it );
         return collect();
      }

    private:
      struct Col
      {
         bool link = false;
         bool active = false;
         Real x = 0;
         Real cost = 0;
         std::vector<GidEntry> rows;
      };
      struct Row
      {
         bool replicated = false;
         bool active = false;
         Real y = 0;
      };

      const RankStack& st_;
      Communicator& comm_;
      bool root_;
      std::unordered_map<std::int64_t, Col> cols_;
      std::unordered_map<std::int64_t, Row> rows_;

      static Real lookup( const std::unordered_map<std::int64_t, Real>& m, std::int64_t gid, const char* what )
      {
         auto it = m.find( gid );
         if( it == m.end() )
            throw StackCorruption( std::string( "reduced solution lacks " ) + what + " " + std::to_string( gid ) );
         return it->second;
      }

      Col& col_at( std::int64_t gid ) { return cols_[gid]; }

      Col& col( std::int64_t gid )
      {
         auto it = cols_.find( gid );
         if( it == cols_.end() )
            throw StackCorruption( "stack references unknown column " + std::to_string( gid ) );
         return it->second;
      }
      Row& row( std::int64_t gid )
      {
         auto it = rows_.find( gid );
         if( it == rows_.end() )
            throw StackCorruption( "stack references unknown row " + std::to_string( gid ) );
         return it->second;
      }
      Col& revive_col( std::int64_t gid, Real x, Real cost )
      {
         auto& c = col( gid );
         if( c.active )
            throw StackCorruption( "column " + std::to_string( gid ) + " restored twice" );
         c.active = true;
         c.x = x;
         c.cost = cost;
         return c;
      }
      Row& revive_row( std::int64_t gid, Real y )
      {
         auto& r = row( gid );
         if( r.active )
            throw StackCorruption( "row " + std::to_string( gid ) + " restored twice" );
         r.active = true;
         r.y = y;
         return r;
      }

      void register_payload( const StackEntry& e )
      {
         const int me = comm_.rank();
         if( auto* mv = std::get_if<PermutationMove>( &e ); mv && mv->owner == me )
         {
            if( mv->kind == MoveKind::RowLocalToZero )
               rows_[mv->gid].replicated = true;
            else if( mv->kind == MoveKind::RowLinkToLocal )
               rows_[mv->gid].replicated = false;
            else if( mv->kind == MoveKind::ColLocalToLink )
               col_at( mv->gid ).link = true;
            else if( mv->kind == MoveKind::ColLinkToLocal )
               col_at( mv->gid ).link = false;
         }
         else if( mv && mv->kind == MoveKind::RowLinkToLocal )
            rows_[mv->gid].replicated = false;
         else if( mv )
         {
            if( mv->kind == MoveKind::RowLocalToZero )
            {
               rows_[mv->gid] = { true, false, 0 };
               for( const auto& x : mv->entries )
                  col_at( x.gid ).rows.push_back( { mv->gid, x.val } );
            }
            else if( mv->kind == MoveKind::ColLocalToLink )
            {
               auto& c = col_at( mv->gid );
               c.link = true;
               c.cost = mv->cost;
               c.rows = mv->entries;
            }
         }
         else if( auto* ld = std::get_if<LinDepCombination>( &e ); ld && ld->q >= 0 )
         {
            rows_[ld->q] = { true, false, 0 };
            for( const auto& x : ld->q_entries )
               col_at( x.gid ).rows.push_back( { ld->q, x.val } );
         }
      }

      Real partial_activity( const Col& c ) const
      {
         Real s = 0;
         for( const auto& e : c.rows )
         {
            auto it = rows_.find( e.gid );
            if( it == rows_.end() || !it->second.active )
               continue;
            if( c.link && it->second.replicated && !root_ )
               continue;
            s += e.val * it->second.y;
         }
         return s;
      }

      /// Reduced costs of `gids`; collective when `collective` is set, which
      /// every rank holding a linking column must request identically.
      std::vector<Real> reduced_costs( const std::vector<std::int64_t>& gids, bool collective )
      {
         std::vector<Real> part( gids.size() );
         for( std::size_t k = 0; k < gids.size(); ++k )
            part[k] = partial_activity( col( gids[k] ) );
         if( collective )
            part = comm_.allreduce( part, ops::sum<Real>(), "postsolve-rc" );
         for( std::size_t k = 0; k < gids.size(); ++k )
            part[k] = col( gids[k] ).cost - part[k];
         return part;
      }

      Real reduced_cost( std::int64_t gid, bool collective ) { return reduced_costs( { gid }, collective ).front(); }

      static bool at( Real x, Real bound )
      {
         return is_finite( bound ) && std::fabs( x - bound ) <= 1e-9 * ( 1 + std::fabs( bound ) );
      }

      void undo( const FixedVar& e ) { revive_col( e.col, e.value, e.cost ); }

      void undo( const SingletonRow& e )
      {
         auto& r = revive_row( e.row, 0 );
         const Real rc = reduced_cost( e.col, e.col_link );
         const Real x = col( e.col ).x;
         if( ( rc > 0 && !at( x, e.old_lower ) ) || ( rc < 0 && !at( x, e.old_upper ) ) )
            r.y = rc / e.a;
      }

      void undo( const BoundTightened& e )
      {
         const Real rc = reduced_cost( e.col, e.col_link );
         auto it = rows_.find( e.row );
         if( it == rows_.end() || !it->second.active )
            return;
         const Real x = col( e.col ).x;
         if( e.upper ? rc < 0 && !at( x, e.old_value ) : rc > 0 && !at( x, e.old_value ) )
            it->second.y += rc / e.a;
      }

      void undo( const SubstitutedCol& e )
      {
         Real rest = 0;
         for( const auto& k : e.row_entries )
         {
            auto& c = col( k.gid );
            c.cost += e.cost / e.a * k.val;
            rest += k.val * c.x;
         }
         revive_col( e.col, ( e.rhs - rest ) / e.a, e.cost );
         revive_row( e.row, e.cost / e.a );
      }

      void undo( const ParallelRow& e )
      {
         auto& kept = row( e.kept );
         auto& gone = revive_row( e.deleted, 0 );
         if( ( kept.y > 0 && e.lower_from_deleted ) || ( kept.y < 0 && e.upper_from_deleted ) )
         {
            gone.y = kept.y / e.lambda;
            kept.y = 0;
         }
      }

      void undo( const RedundantRow& e ) { revive_row( e.row, 0 ); }

      void undo( const ForcingRow& e )
      {
         for( const auto& c : e.cols )
            revive_col( c.col, c.value, c.cost );
         auto& r = revive_row( e.row, 0 );
         std::vector<std::int64_t> link, local;
         std::vector<Real> link_a, local_a;
         for( const auto& c : e.cols )
         {
            ( c.link ? link : local ).push_back( c.col );
            ( c.link ? link_a : local_a ).push_back( c.a );
         }
         const auto rc_link = reduced_costs( link, e.replicated );
         const auto rc_local = reduced_costs( local, false );
         Real best = e.at_min ? kInf : -kInf;
         auto fold = [&]( Real v ) { best = e.at_min ? std::min( best, v ) : std::max( best, v ); };
         for( std::size_t k = 0; k < link.size(); ++k )
            fold( rc_link[k] / link_a[k] );
         for( std::size_t k = 0; k < local.size(); ++k )
            fold( rc_local[k] / local_a[k] );
         if( e.replicated )
            best = comm_.allreduce( best, e.at_min ? ops::min<Real>() : ops::max<Real>(), "postsolve-forcing" );
         if( !is_finite( best ) )
            best = 0;
         if( !e.equality )
            best = e.at_min ? std::min<Real>( best, 0 ) : std::max<Real>( best, 0 );
         r.y = best;
      }

      void undo( const PermutationMove& e )
      {
         const bool owner = e.owner == comm_.rank();
         switch( e.kind )
         {
         case MoveKind::RowLinkToZero: break;
         case MoveKind::RowLinkToLocal:
         {
            const Real y = comm_.allreduce( owner ? row( e.gid ).y : 0.0, ops::sum<Real>(), "postsolve-move" );
            auto& r = row( e.gid );
            if( owner != r.active )
               throw StackCorruption( "row " + std::to_string( e.gid ) + " held by the wrong rank" );
            r.active = true;
            r.replicated = true;
            r.y = y;
            break;
         }
         case MoveKind::RowLocalToZero:
         {
            auto& r = row( e.gid );
            r.replicated = false;
            if( !owner )
               r.active = false;
            break;
         }
         case MoveKind::ColLinkToLocal:
         {
            std::vector<Real> v{ 0, 0 };
            if( owner )
               v = { col( e.gid ).x, col( e.gid ).cost };
            v = comm_.allreduce( v, ops::sum<Real>(), "postsolve-move" );
            auto& c = col( e.gid );
            if( owner != c.active )
               throw StackCorruption( "column " + std::to_string( e.gid ) + " held by the wrong rank" );
            c.active = true;
            c.link = true;
            c.x = v[0];
            c.cost = v[1];
            break;
         }
         case MoveKind::ColLocalToLink:
         {
            auto& c = col( e.gid );
            c.link = false;
            if( !owner )
               c.active = false;
            break;
         }
         }
      }

      void undo( const LinDepCombination& e )
      {
         Real yq = 0;
         if( e.q >= 0 )
         {
            auto& q = row( e.q );
            if( !q.active )
               throw StackCorruption( "combined row " + std::to_string( e.q ) + " is not active" );
            yq = q.y;
            q.active = false;
         }
         if( e.owner != comm_.rank() )
            return;
         revive_row( e.p, 0 );
         for( const auto& w : e.weights )
            row( w.gid ).y += w.val * yq;
      }

      void undo( const SyncEvent& e ) { comm_.barrier( "postsolve:" + e.layout ); }

      RecoveredValues collect()
      {
         RecoveredValues v;
         const std::size_t n = st_.num_cols, m = st_.num_eq + st_.num_ineq;
         v.x.assign( n, 0 );
         v.rc.assign( n, 0 );
         v.y.assign( m, 0 );
         std::vector<Real> owners( n + m, 0 );
         std::vector<std::int64_t> link;
         for( const auto& [gid, c] : cols_ )
            if( c.active && c.link )
               link.push_back( gid );
         std::sort( link.begin(), link.end() );
         const auto rc_link = reduced_costs( link, true );
         for( std::size_t k = 0; k < link.size(); ++k )
            if( root_ )
               put( v, owners, link[k], col( link[k] ).x, rc_link[k] );
         for( const auto& [gid, c] : cols_ )
            if( c.active && !c.link )
               put( v, owners, gid, c.x, c.cost - partial_activity( c ) );
         for( const auto& [gid, r] : rows_ )
         {
            if( !r.active || ( r.replicated && !root_ ) )
               continue;
            if( gid < 0 || static_cast<std::size_t>( gid ) >= m )
               throw StackCorruption( "row " + std::to_string( gid ) + " survives postsolve" );
            v.y[gid] = r.y;
            owners[n + gid] += 1;
         }
         v.x = comm_.allreduce( v.x, ops::sum<Real>(), "postsolve-collect" );
         v.rc = comm_.allreduce( v.rc, ops::sum<Real>(), "postsolve-collect" );
         v.y = comm_.allreduce( v.y, ops::sum<Real>(), "postsolve-collect" );
         owners = comm_.allreduce( owners, ops::sum<Real>(), "postsolve-collect" );
         for( std::size_t k = 0; k < n + m; ++k )
            if( owners[k] != 1 )
               throw StackCorruption( std::string( k < n ? "column " : "row " ) +
                                      std::to_string( k < n ? k : k - n ) + " restored " +
                                      std::to_string( static_cast<int>( owners[k] ) ) + " times" );
         return v;
      }

      void put( RecoveredValues& v, std::vector<Real>& owners, std::int64_t gid, Real x, Real rc )
      {
         if( gid < 0 || static_cast<std::size_t>( gid ) >= v.x.size() )
            throw StackCorruption( "column " + std::to_string( gid ) + " out of range" );
         v.x[gid] = x;
         v.rc[gid] = rc;
         owners[gid] += 1;
      }
   };

} // namespace detail

/// Replays one rank's stack in reverse (collective).
inline RecoveredValues postsolve_rank( const RankStack& st, Communicator& comm,
                                       const std::unordered_map<std::int64_t, Real>& x,
                                       const std::unordered_map<std::int64_t, Real>& y )
{
   if( st.rank != comm.rank() || st.nranks != comm.size() )
      throw StackCorruption( "stack of rank " + std::to_string( st.rank ) + "/" + std::to_string( st.nranks ) +
                             " replayed on rank " + std::to_string( comm.rank() ) + "/" +
                             std::to_string( comm.size() ) );
   return detail::Replay( st, comm, x, y ).run();
}

/// Splits row multipliers and reduced costs into the sign-constrained parts
/// of the dual, dropping parts that belong to infinite sides.
inline PrimalDualSolution assemble_solution( const MonolithicLP& lp, const RecoveredValues& v )
{
   PrimalDualSolution s;
   s.resize( lp.ncols(), lp.neq(), lp.nineq() );
   for( Index j = 0; j < lp.ncols(); ++j )
   {
      s.x[j] = v.x[j];
      s.gamma[j] = is_finite( lp.l[j] ) ? std::max<Real>( v.rc[j], 0 ) : 0;
      s.phi[j] = is_finite( lp.u[j] ) ? std::max<Real>( -v.rc[j], 0 ) : 0;
   }
   for( Index i = 0; i < lp.neq(); ++i )
      s.y[i] = v.y[i];
   for( Index i = 0; i < lp.nineq(); ++i )
   {
      const Real yi = v.y[lp.neq() + i];
      s.zplus[i] = is_finite( lp.d[i] ) ? std::max<Real>( yi, 0 ) : 0;
      s.zminus[i] = is_finite( lp.f[i] ) ? std::max<Real>( -yi, 0 ) : 0;
   }
   return s;
}

struct PostsolveResult
{
   PrimalDualSolution solution;
   KktReport reduced_report;  ///< input solution against the reduced problem
   KktReport report;          ///< recovered solution against the original problem
};

/// Recovers a solution of `original` from a solution of the reduced problem
/// whose columns and rows carry global ids `col_ids` and `row_ids` (equality
/// rows first). Runs one replay per stack.
inline PostsolveResult postsolve( const std::vector<RankStack>& stacks, const std::vector<std::int64_t>& col_ids,
                                  const std::vector<std::int64_t>& row_ids, const MonolithicLP& reduced,
                                  const PrimalDualSolution& reduced_solution, const MonolithicLP& original,
                                  ExecMode mode = ExecMode::Lockstep )
{
   if( stacks.empty() )
      throw StackCorruption( "no postsolve stacks" );
   if( static_cast<Index>( col_ids.size() ) != reduced.ncols() ||
       static_cast<Index>( row_ids.size() ) != reduced.neq() + reduced.nineq() )
      throw ContractViolation( "reduced ids do not match the reduced problem" );
   PostsolveResult out;
   out.reduced_report = kkt_check( reduced, reduced_solution );

   std::unordered_map<std::int64_t, Real> x, y;
   for( std::size_t j = 0; j < col_ids.size(); ++j )
      x[col_ids[j]] = reduced_solution.x[j];
   for( Index i = 0; i < reduced.neq(); ++i )
      y[row_ids[i]] = reduced_solution.y[i];
   for( Index i = 0; i < reduced.nineq(); ++i )
      y[row_ids[reduced.neq() + i]] = reduced_solution.zplus[i] - reduced_solution.zminus[i];

   const int nranks = static_cast<int>( stacks.size() );
   std::vector<RecoveredValues> vals( nranks );
   run_ranks( nranks, mode, [&]( Communicator& comm ) {
      vals[comm.rank()] = postsolve_rank( stacks[comm.rank()], comm, x, y );
   } );
   const auto& v = vals.front();
   if( static_cast<Index>( v.x.size() ) != original.ncols() ||
       static_cast<Index>( v.y.size() ) != original.neq() + original.nineq() )
      throw StackCorruption( "stack dimensions do not match the original problem" );
   out.solution = assemble_solution( original, v );
   out.report = kkt_check( original, out.solution );
   return out;
}

} // namespace ahlp

#endif
