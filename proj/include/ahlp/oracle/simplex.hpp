#ifndef AHLP_ORACLE_SIMPLEX_HPP
#define AHLP_ORACLE_SIMPLEX_HPP

#include "ahlp/postsolve/solution.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ahlp
{

class OracleRefused : public std::runtime_error
{
 public:
   using std::runtime_error::runtime_error;
};

enum class OracleStatus
{
   Optimal,
   Infeasible,
   Unbounded
};

inline const char* to_string( OracleStatus s )
{
   return s == OracleStatus::Optimal ? "optimal" : s == OracleStatus::Infeasible ? "infeasible" : "unbounded";
}

struct OracleResult
{
   OracleStatus status = OracleStatus::Infeasible;
   PrimalDualSolution solution;
   Real value = 0; ///< objective including the offset
   int iterations = 0;
};

struct OracleOptions
{
   Index cap = 2000;       ///< refuse problems with more rows or columns
   Real feastol = 1e-9;
   Real opttol = 1e-9;
   Real pivtol = 1e-9;
   int refactor_every = 100;
   int degenerate_limit = 50; ///< consecutive degenerate pivots before Bland's rule
};

/// Dense-row data of min c'x, Ax = b, d <= Cx <= f, l <= x <= u.
struct DenseLP
{
   Index n = 0;
   std::vector<std::vector<Real>> A, C;
   std::vector<Real> b, d, f, c, l, u;
   Real objective_offset = 0;

   static DenseLP from( const MonolithicLP& lp )
   {
      DenseLP dl;
      dl.n = lp.ncols();
      auto densify = [&]( const SparseMatrix& m ) {
         std::vector<std::vector<Real>> out( m.rows(), std::vector<Real>( dl.n, 0 ) );
         for( const auto& t : m.triplets() )
            out[t.row][t.col] = t.val;
         return out;
      };
      dl.A = densify( lp.A );
      dl.C = densify( lp.C );
      dl.b = lp.b;
      dl.d = lp.d;
      dl.f = lp.f;
      dl.c = lp.c;
      dl.l = lp.l;
      dl.u = lp.u;
      dl.objective_offset = lp.objective_offset;
      return dl;
   }
};

namespace detail
{

/// Bounded-variable primal simplex on [A 0; C -I] (x, s) = (b, 0) with one
/// artificial per row in phase 1. The basis inverse is kept explicitly and
/// rebuilt periodically.
class BoundedSimplex
{
 public:
   BoundedSimplex( const DenseLP& lp, const OracleOptions& opt ) : lp_( lp ), opt_( opt )
   {
      meq_ = static_cast<Index>( lp.A.size() );
      min_ = static_cast<Index>( lp.C.size() );
      m_ = meq_ + min_;
      n_ = lp.n;
      ntot_ = n_ + min_ + m_;
      if( m_ > opt.cap || n_ > opt.cap )
         throw OracleRefused( "problem exceeds the oracle size cap of " + std::to_string( opt.cap ) );
      cols_.resize( ntot_ );
      for( Index i = 0; i < meq_; ++i )
         for( Index j = 0; j < n_; ++j )
            if( lp.A[i][j] != 0 )
               cols_[j].push_back( { i, lp.A[i][j] } );
      for( Index i = 0; i < min_; ++i )
      {
         for( Index j = 0; j < n_; ++j )
            if( lp.C[i][j] != 0 )
               cols_[j].push_back( { meq_ + i, lp.C[i][j] } );
         cols_[n_ + i].push_back( { meq_ + i, -1.0 } );
      }
      lo_.assign( ntot_, 0 );
      up_.assign( ntot_, kInf );
      for( Index j = 0; j < n_; ++j )
      {
         lo_[j] = lp.l[j];
         up_[j] = lp.u[j];
      }
      for( Index i = 0; i < min_; ++i )
      {
         lo_[n_ + i] = lp.d[i];
         up_[n_ + i] = lp.f[i];
      }
      rhs_.assign( m_, 0 );
      for( Index i = 0; i < meq_; ++i )
         rhs_[i] = lp.b[i];
   }

   OracleResult solve()
   {
      OracleResult res;
      for( Index j = 0; j < n_ + min_; ++j )
         if( lo_[j] > up_[j] )
            return res;

      x_.assign( ntot_, 0 );
      basic_pos_.assign( ntot_, -1 );
      for( Index j = 0; j < n_ + min_; ++j )
         x_[j] = is_finite( lo_[j] ) ? lo_[j] : is_finite( up_[j] ) ? up_[j] : 0;
      std::vector<Real> resid = rhs_;
      for( Index j = 0; j < n_ + min_; ++j )
         for( auto [i, v] : cols_[j] )
            resid[i] -= v * x_[j];
      basis_.resize( m_ );
      for( Index i = 0; i < m_; ++i )
      {
         const Index a = n_ + min_ + i;
         cols_[a] = { { i, resid[i] < 0 ? -1.0 : 1.0 } };
         x_[a] = std::fabs( resid[i] );
         basis_[i] = a;
         basic_pos_[a] = i;
      }
      cost_.assign( ntot_, 0 );
      for( Index i = 0; i < m_; ++i )
         cost_[n_ + min_ + i] = 1;
      refactor();

      auto st = iterate( false );
      res.iterations = iters_;
      Real infeas = 0, scale = 1;
      for( Index i = 0; i < m_; ++i )
      {
         infeas += x_[n_ + min_ + i];
         scale = std::max( scale, std::fabs( rhs_[i] ) );
      }
      if( st != OracleStatus::Optimal || infeas > 1e-7 * scale )
         return res;

      for( Index i = 0; i < m_; ++i )
         up_[n_ + min_ + i] = 0;
      drive_out_artificials();
      cost_.assign( ntot_, 0 );
      for( Index j = 0; j < n_; ++j )
         cost_[j] = lp_.c[j];
      degenerate_ = 0;
      st = iterate( true );
      res.iterations = iters_;
      if( st == OracleStatus::Unbounded )
      {
         res.status = OracleStatus::Unbounded;
         return res;
      }
      refactor();
      extract( res );
      return res;
   }

 private:
   using Column = std::vector<std::pair<Index, Real>>;

   const DenseLP& lp_;
   OracleOptions opt_;
   Index meq_, min_, m_, n_, ntot_;
   std::vector<Column> cols_;
   std::vector<Real> lo_, up_, rhs_, cost_, x_;
   std::vector<Index> basis_, basic_pos_;
   std::vector<Real> binv_; ///< row-major m x m
   int iters_ = 0;
   int since_refactor_ = 0;
   int degenerate_ = 0;

   Real& binv( Index i, Index k ) { return binv_[std::size_t( i ) * m_ + k]; }

   void refactor()
   {
      std::vector<Real> bm( std::size_t( m_ ) * m_, 0 );
      for( Index k = 0; k < m_; ++k )
         for( auto [i, v] : cols_[basis_[k]] )
            bm[std::size_t( i ) * m_ + k] = v;
      binv_.assign( std::size_t( m_ ) * m_, 0 );
      for( Index i = 0; i < m_; ++i )
         binv( i, i ) = 1;
      for( Index k = 0; k < m_; ++k )
      {
         Index piv = k;
         for( Index i = k + 1; i < m_; ++i )
            if( std::fabs( bm[std::size_t( i ) * m_ + k] ) > std::fabs( bm[std::size_t( piv ) * m_ + k] ) )
               piv = i;
         if( std::fabs( bm[std::size_t( piv ) * m_ + k] ) < 1e-13 )
            throw std::runtime_error( "oracle: singular basis" );
         if( piv != k )
            for( Index j = 0; j < m_; ++j )
            {
               std::swap( bm[std::size_t( piv ) * m_ + j], bm[std::size_t( k ) * m_ + j] );
               std::swap( binv( piv, j ), binv( k, j ) );
            }
         const Real p = bm[std::size_t( k ) * m_ + k];
         for( Index j = 0; j < m_; ++j )
         {
            bm[std::size_t( k ) * m_ + j] /= p;
            binv( k, j ) /= p;
         }
         for( Index i = 0; i < m_; ++i )
         {
            if( i == k )
               continue;
            const Real f = bm[std::size_t( i ) * m_ + k];
            if( f == 0 )
               continue;
            for( Index j = 0; j < m_; ++j )
            {
               bm[std::size_t( i ) * m_ + j] -= f * bm[std::size_t( k ) * m_ + j];
               binv( i, j ) -= f * binv( k, j );
            }
         }
      }
      std::vector<Real> r = rhs_;
      for( Index j = 0; j < ntot_; ++j )
         if( basic_pos_[j] < 0 && x_[j] != 0 )
            for( auto [i, v] : cols_[j] )
               r[i] -= v * x_[j];
      for( Index k = 0; k < m_; ++k )
      {
         Real s = 0;
         for( Index i = 0; i < m_; ++i )
            s += binv( k, i ) * r[i];
         x_[basis_[k]] = s;
      }
      since_refactor_ = 0;
   }

   std::vector<Real> ftran( Index j )
   {
      std::vector<Real> a( m_, 0 );
      for( auto [i, v] : cols_[j] )
         for( Index k = 0; k < m_; ++k )
            a[k] += binv( k, i ) * v;
      return a;
   }

   std::vector<Real> duals()
   {
      std::vector<Real> y( m_, 0 );
      for( Index k = 0; k < m_; ++k )
      {
         const Real cb = cost_[basis_[k]];
         if( cb == 0 )
            continue;
         for( Index i = 0; i < m_; ++i )
            y[i] += cb * binv( k, i );
      }
      return y;
   }

   Real reduced_cost( Index j, const std::vector<Real>& y ) const
   {
      Real d = cost_[j];
      for( auto [i, v] : cols_[j] )
         d -= y[i] * v;
      return d;
   }

   void pivot( Index r, Index enter, const std::vector<Real>& alpha )
   {
      const Real p = alpha[r];
      for( Index j = 0; j < m_; ++j )
         binv( r, j ) /= p;
      for( Index k = 0; k < m_; ++k )
      {
         if( k == r || alpha[k] == 0 )
            continue;
         const Real f = alpha[k];
         for( Index j = 0; j < m_; ++j )
            binv( k, j ) -= f * binv( r, j );
      }
      basic_pos_[basis_[r]] = -1;
      basis_[r] = enter;
      basic_pos_[enter] = r;
      if( ++since_refactor_ >= opt_.refactor_every )
         refactor();
   }

   void drive_out_artificials()
   {
      for( Index r = 0; r < m_; ++r )
      {
         if( basis_[r] < n_ + min_ )
            continue;
         for( Index j = 0; j < n_ + min_; ++j )
         {
            if( basic_pos_[j] >= 0 )
               continue;
            auto alpha = ftran( j );
            if( std::fabs( alpha[r] ) > 1e-7 )
            {
               const Index leave = basis_[r];
               pivot( r, j, alpha );
               x_[leave] = 0;
               break;
            }
         }
      }
      refactor();
   }

   OracleStatus iterate( bool phase2 )
   {
      const int limit = 50 * int( m_ + ntot_ ) + 1000;
      for( int it = 0;; ++it )
      {
         if( it > limit )
            throw std::runtime_error( "oracle: iteration limit reached" );
         auto y = duals();
         const bool bland = degenerate_ >= opt_.degenerate_limit;
         Index enter = -1;
         Real best = 0;
         int dir = 0;
         for( Index j = 0; j < ntot_; ++j )
         {
            if( basic_pos_[j] >= 0 || lo_[j] == up_[j] )
               continue;
            const Real d = reduced_cost( j, y );
            int cand = 0;
            if( d < -opt_.opttol && ( !is_finite( up_[j] ) || x_[j] < up_[j] ) )
               cand = 1;
            else if( d > opt_.opttol && ( !is_finite( lo_[j] ) || x_[j] > lo_[j] ) )
               cand = -1;
            if( !cand )
               continue;
            if( bland )
            {
               enter = j;
               dir = cand;
               break;
            }
            if( std::fabs( d ) > best )
            {
               best = std::fabs( d );
               enter = j;
               dir = cand;
            }
         }
         if( enter < 0 )
            return OracleStatus::Optimal;
         ++iters_;

         auto alpha = ftran( enter );
         // Harris two-pass ratio test; basic k moves by -t*dir*alpha[k]
         Real tmax = kInf;
         for( Index k = 0; k < m_; ++k )
         {
            const Real g = dir * alpha[k];
            if( std::fabs( g ) <= opt_.pivtol )
               continue;
            const Index b = basis_[k];
            if( g > 0 && is_finite( lo_[b] ) )
               tmax = std::min( tmax, ( x_[b] - lo_[b] + opt_.feastol ) / g );
            else if( g < 0 && is_finite( up_[b] ) )
               tmax = std::min( tmax, ( up_[b] - x_[b] + opt_.feastol ) / -g );
         }
         Index leave = -1;
         Real t = kInf, bestpiv = 0;
         for( Index k = 0; k < m_; ++k )
         {
            const Real g = dir * alpha[k];
            if( std::fabs( g ) <= opt_.pivtol )
               continue;
            const Index b = basis_[k];
            Real ratio = kInf;
            if( g > 0 && is_finite( lo_[b] ) )
               ratio = ( x_[b] - lo_[b] ) / g;
            else if( g < 0 && is_finite( up_[b] ) )
               ratio = ( up_[b] - x_[b] ) / -g;
            if( ratio > tmax )
               continue;
            const bool better = bland ? ( leave < 0 || b < basis_[leave] ) : std::fabs( g ) > bestpiv;
            if( better )
            {
               leave = k;
               bestpiv = std::fabs( g );
               t = std::max<Real>( ratio, 0 );
            }
         }
         const Real range = up_[enter] - lo_[enter];
         const bool flip = is_finite( range ) && range <= t;
         if( flip )
            t = range;
         if( !is_finite( t ) )
         {
            if( phase2 )
               return OracleStatus::Unbounded;
            throw std::runtime_error( "oracle: unbounded phase 1" );
         }
         degenerate_ = t <= opt_.feastol ? degenerate_ + 1 : 0;
         for( Index k = 0; k < m_; ++k )
            x_[basis_[k]] -= t * dir * alpha[k];
         x_[enter] += t * dir;
         if( flip )
         {
            x_[enter] = dir > 0 ? up_[enter] : lo_[enter];
            continue;
         }
         const Index out = basis_[leave];
         const Real g = dir * alpha[leave];
         x_[out] = g > 0 ? lo_[out] : up_[out];
         pivot( leave, enter, alpha );
      }
   }

   void extract( OracleResult& res )
   {
      auto y = duals();
      auto& s = res.solution;
      s.resize( n_, meq_, min_ );
      for( Index j = 0; j < n_; ++j )
      {
         Real xv = x_[j];
         if( basic_pos_[j] >= 0 )
         {
            if( is_finite( lo_[j] ) && std::fabs( xv - lo_[j] ) <= opt_.feastol * ( 1 + std::fabs( lo_[j] ) ) )
               xv = lo_[j];
            if( is_finite( up_[j] ) && std::fabs( xv - up_[j] ) <= opt_.feastol * ( 1 + std::fabs( up_[j] ) ) )
               xv = up_[j];
         }
         s.x[j] = xv;
         const Real d = basic_pos_[j] >= 0 ? 0.0 : reduced_cost( j, y );
         s.gamma[j] = is_finite( lo_[j] ) ? std::max<Real>( d, 0 ) : 0;
         s.phi[j] = is_finite( up_[j] ) ? std::max<Real>( -d, 0 ) : 0;
      }
      for( Index i = 0; i < meq_; ++i )
         s.y[i] = y[i];
      for( Index i = 0; i < min_; ++i )
      {
         const Real w = y[meq_ + i];
         s.zplus[i] = is_finite( lp_.d[i] ) ? std::max<Real>( w, 0 ) : 0;
         s.zminus[i] = is_finite( lp_.f[i] ) ? std::max<Real>( -w, 0 ) : 0;
      }
      res.value = lp_.objective_offset;
      for( Index j = 0; j < n_; ++j )
         res.value += lp_.c[j] * s.x[j];
      res.status = OracleStatus::Optimal;
   }
};

} // namespace detail

/// Reference solver for desk-scale problems.
inline OracleResult solve_reference( const DenseLP& lp, const OracleOptions& opt = {} )
{
   detail::BoundedSimplex s( lp, opt );
   return s.solve();
}

inline OracleResult solve_reference( const MonolithicLP& lp, const OracleOptions& opt = {} )
{
   if( lp.neq() + lp.nineq() > opt.cap || lp.ncols() > opt.cap )
      throw OracleRefused( "problem exceeds the oracle size cap of " + std::to_string( opt.cap ) );
   return solve_reference( DenseLP::from( lp ), opt );
}

struct ParallelPair
{
   Index first;
   Index second;
   Real lambda; ///< row second = lambda * row first
   bool operator==( const ParallelPair& ) const = default;
};

/// Ratio spread test shared by every parallel-row check: the rows have the
/// same support and max - min of the ratios b_k / a_k is at most tol * (1 + |ratio|).
inline bool proportional( std::span<const Index> ca, std::span<const Real> va, std::span<const Index> cb,
                          std::span<const Real> vb, Real tol, Real* lambda = nullptr )
{
   if( ca.size() != cb.size() || ca.empty() )
      return false;
   Real lo = kInf, hi = -kInf;
   for( std::size_t k = 0; k < ca.size(); ++k )
   {
      if( ca[k] != cb[k] )
         return false;
      const Real r = vb[k] / va[k];
      lo = std::min( lo, r );
      hi = std::max( hi, r );
   }
   const Real ref = vb[0] / va[0];
   if( lambda )
      *lambda = ref;
   return hi - lo <= tol * ( 1 + std::fabs( ref ) );
}

/// All pairs i < j of nonempty rows of `m` that are proportional at `tol`.
inline std::vector<ParallelPair> brute_force_parallel_rows( const SparseMatrix& m, Real tol )
{
   std::vector<ParallelPair> out;
   for( Index i = 0; i < m.rows(); ++i )
      for( Index j = i + 1; j < m.rows(); ++j )
      {
         Real lam = 0;
         if( proportional( m.row_cols( i ), m.row_vals( i ), m.row_cols( j ), m.row_vals( j ), tol, &lam ) )
            out.push_back( { i, j, lam } );
      }
   return out;
}

/// Rank by Gaussian elimination with full pivoting; pivots at most
/// tol * (largest initial magnitude) count as zero.
inline Index dense_rank( std::vector<std::vector<Real>> a, Real tol )
{
   const Index m = static_cast<Index>( a.size() );
   if( m == 0 )
      return 0;
   const Index n = static_cast<Index>( a[0].size() );
   Real scale = 0;
   for( const auto& row : a )
      for( Real v : row )
         scale = std::max( scale, std::fabs( v ) );
   if( scale == 0 )
      return 0;
   Index rank = 0;
   std::vector<char> col_used( n, 0 );
   for( Index k = 0; k < std::min( m, n ); ++k )
   {
      Index pr = -1, pc = -1;
      Real best = 0;
      for( Index i = k; i < m; ++i )
         for( Index j = 0; j < n; ++j )
            if( !col_used[j] && std::fabs( a[i][j] ) > best )
            {
               best = std::fabs( a[i][j] );
               pr = i;
               pc = j;
            }
      if( pr < 0 || best <= tol * scale )
         break;
      std::swap( a[pr], a[k] );
      col_used[pc] = 1;
      for( Index i = k + 1; i < m; ++i )
      {
         const Real f = a[i][pc] / a[k][pc];
         if( f == 0 )
            continue;
         for( Index j = 0; j < n; ++j )
            a[i][j] -= f * a[k][j];
         a[i][pc] = 0;
      }
      ++rank;
   }
   return rank;
}

inline Index dense_rank( const SparseMatrix& m, Real tol )
{
   std::vector<std::vector<Real>> a( m.rows(), std::vector<Real>( m.cols(), 0 ) );
   for( const auto& t : m.triplets() )
      a[t.row][t.col] = t.val;
   return dense_rank( std::move( a ), tol );
}

} // namespace ahlp

#endif
