use crate::weights::{BoundaryKind, CustomBoundary, WeightArray};

/// omega(1,0)=2, omega(2,0)=1, omega(0,1)=4, omega(0,2)=2, interior rows 1,2 / 3,1.
pub(crate) fn two_by_two() -> WeightArray {
    let omega = vec![0.0, 2.0, 1.0, 4.0, 1.0, 2.0, 2.0, 3.0, 1.0];
    let kind = BoundaryKind::Custom(CustomBoundary { south: vec![2.0, 1.0], west: vec![4.0, 2.0] });
    WeightArray::from_parts(2, 2, kind, omega).unwrap()
}
