#pragma once

#include "silref/mesh.h"
#include "silref/so3.h"

namespace silref {

// Procedural test geometry. All meshes are centred near the origin.

TriangleMesh MakeTetrahedron();
TriangleMesh MakeCube(double side = 1.0);

// Low-poly quadcopter (body, four arms, motor pods, gimbal, skids), about
// 0.4 m motor to motor and well under 500 triangles. Model frame: x right,
// y down, z forward.
TriangleMesh MakeQuadcopterMesh();

// Exocentric camera: 64.69 deg horizontal FoV at 320x240.
CameraIntrinsics ExocentricCamera();

struct DeskScene {
  TriangleMesh mesh;
  CameraIntrinsics camera;
  Pose gt_pose;
};

// Quadcopter 1.2 m in front of the exocentric camera, seen from above.
DeskScene MakeDeskScene();

}  // namespace silref
