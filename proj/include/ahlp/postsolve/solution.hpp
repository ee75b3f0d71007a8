#ifndef AHLP_POSTSOLVE_SOLUTION_HPP
#define AHLP_POSTSOLVE_SOLUTION_HPP

#include "ahlp/model/block_problem.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace ahlp
{

/// Primal-dual point of min c'x, Ax = b, d <= Cx <= f, l <= x <= u with
/// dual feasibility A'y + C'(z+ - z-) + gamma - phi = c.
struct PrimalDualSolution
{
   std::vector<Real> x;
   std::vector<Real> y;      ///< per equality row
   std::vector<Real> zplus;  ///< per inequality row, multiplier of d <= Cx
   std::vector<Real> zminus; ///< per inequality row, multiplier of Cx <= f
   std::vector<Real> gamma;  ///< per column, multiplier of l <= x
   std::vector<Real> phi;    ///< per column, multiplier of x <= u

   void resize( Index n, Index neq, Index nineq )
   {
      x.assign( n, 0 );
      gamma.assign( n, 0 );
      phi.assign( n, 0 );
      y.assign( neq, 0 );
      zplus.assign( nineq, 0 );
      zminus.assign( nineq, 0 );
   }
};

struct KktReport
{
   Real primal = 0;
   Real dual = 0;
   Real complementarity = 0;
   Real gap = 0;
   Real primal_objective = 0;
   Real dual_objective = 0;

   Real worst() const { return std::max( { primal, dual, complementarity, gap } ); }
   bool ok( Real tol ) const { return worst() <= tol; }
   std::string describe() const
   {
      return "primal " + std::to_string( primal ) + " dual " + std::to_string( dual ) + " compl " +
             std::to_string( complementarity ) + " gap " + std::to_string( gap );
   }
};

/// Sparse product M x.
inline std::vector<Real> multiply( const SparseMatrix& m, const std::vector<Real>& x )
{
   std::vector<Real> out( m.rows(), 0 );
   for( Index i = 0; i < m.rows(); ++i )
   {
      auto cs = m.row_cols( i );
      auto vs = m.row_vals( i );
      Real s = 0;
      for( std::size_t k = 0; k < cs.size(); ++k )
         s += vs[k] * x[cs[k]];
      out[i] = s;
   }
   return out;
}

/// Sparse product M' y accumulated into out.
inline void multiply_transpose_add( const SparseMatrix& m, const std::vector<Real>& y, std::vector<Real>& out )
{
   for( Index i = 0; i < m.rows(); ++i )
   {
      auto cs = m.row_cols( i );
      auto vs = m.row_vals( i );
      for( std::size_t k = 0; k < cs.size(); ++k )
         out[cs[k]] += vs[k] * y[i];
   }
}

/// Scaled violations of the optimality conditions. Every residual is divided by
/// 1 + |reference value| (right-hand side, bound, or cost); complementarity
/// products are divided by 1 + |bound|.
inline KktReport kkt_check( const MonolithicLP& lp, const PrimalDualSolution& s )
{
   const Index n = lp.ncols();
   if( static_cast<Index>( s.x.size() ) != n || static_cast<Index>( s.gamma.size() ) != n ||
       static_cast<Index>( s.phi.size() ) != n || static_cast<Index>( s.y.size() ) != lp.neq() ||
       static_cast<Index>( s.zplus.size() ) != lp.nineq() || static_cast<Index>( s.zminus.size() ) != lp.nineq() )
      throw ContractViolation( "solution dimensions do not match the problem" );
   KktReport r;
   auto rel = []( Real v, Real ref ) { return std::fabs( v ) / ( 1 + std::fabs( ref ) ); };

   const auto ax = multiply( lp.A, s.x );
   const auto cx = multiply( lp.C, s.x );
   for( Index i = 0; i < lp.neq(); ++i )
      r.primal = std::max( r.primal, rel( ax[i] - lp.b[i], lp.b[i] ) );
   for( Index i = 0; i < lp.nineq(); ++i )
   {
      if( is_finite( lp.d[i] ) )
         r.primal = std::max( r.primal, rel( std::max<Real>( lp.d[i] - cx[i], 0 ), lp.d[i] ) );
      if( is_finite( lp.f[i] ) )
         r.primal = std::max( r.primal, rel( std::max<Real>( cx[i] - lp.f[i], 0 ), lp.f[i] ) );
   }
   for( Index j = 0; j < n; ++j )
   {
      if( is_finite( lp.l[j] ) )
         r.primal = std::max( r.primal, rel( std::max<Real>( lp.l[j] - s.x[j], 0 ), lp.l[j] ) );
      if( is_finite( lp.u[j] ) )
         r.primal = std::max( r.primal, rel( std::max<Real>( s.x[j] - lp.u[j], 0 ), lp.u[j] ) );
   }

   std::vector<Real> lhs( n, 0 );
   multiply_transpose_add( lp.A, s.y, lhs );
   std::vector<Real> z( lp.nineq() );
   for( Index i = 0; i < lp.nineq(); ++i )
      z[i] = s.zplus[i] - s.zminus[i];
   multiply_transpose_add( lp.C, z, lhs );
   for( Index j = 0; j < n; ++j )
      r.dual = std::max( r.dual, rel( lhs[j] + s.gamma[j] - s.phi[j] - lp.c[j], lp.c[j] ) );
   auto sign_check = [&]( Real v, bool finite_side ) {
      r.dual = std::max( r.dual, std::max<Real>( -v, 0 ) );
      if( !finite_side )
         r.dual = std::max( r.dual, std::fabs( v ) );
   };
   for( Index i = 0; i < lp.nineq(); ++i )
   {
      sign_check( s.zplus[i], is_finite( lp.d[i] ) );
      sign_check( s.zminus[i], is_finite( lp.f[i] ) );
   }
   for( Index j = 0; j < n; ++j )
   {
      sign_check( s.gamma[j], is_finite( lp.l[j] ) );
      sign_check( s.phi[j], is_finite( lp.u[j] ) );
   }

   auto comp = [&]( Real mult, Real slack, Real bound ) {
      if( is_finite( bound ) )
         r.complementarity = std::max( r.complementarity, std::fabs( mult * slack ) / ( 1 + std::fabs( bound ) ) );
   };
   for( Index i = 0; i < lp.nineq(); ++i )
   {
      comp( s.zplus[i], cx[i] - lp.d[i], lp.d[i] );
      comp( s.zminus[i], lp.f[i] - cx[i], lp.f[i] );
   }
   for( Index j = 0; j < n; ++j )
   {
      comp( s.gamma[j], s.x[j] - lp.l[j], lp.l[j] );
      comp( s.phi[j], lp.u[j] - s.x[j], lp.u[j] );
   }

   Real pobj = lp.objective_offset, dobj = lp.objective_offset;
   for( Index j = 0; j < n; ++j )
   {
      pobj += lp.c[j] * s.x[j];
      if( is_finite( lp.l[j] ) )
         dobj += lp.l[j] * s.gamma[j];
      if( is_finite( lp.u[j] ) )
         dobj -= lp.u[j] * s.phi[j];
   }
   for( Index i = 0; i < lp.neq(); ++i )
      dobj += lp.b[i] * s.y[i];
   for( Index i = 0; i < lp.nineq(); ++i )
   {
      if( is_finite( lp.d[i] ) )
         dobj += lp.d[i] * s.zplus[i];
      if( is_finite( lp.f[i] ) )
         dobj -= lp.f[i] * s.zminus[i];
   }
   r.primal_objective = pobj;
   r.dual_objective = dobj;
   r.gap = rel( pobj - dobj, pobj );
   return r;
}

} // namespace ahlp

#endif
