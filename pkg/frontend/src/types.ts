// Payload shapes of the screening service's v1 API (snake_case JSON).

export type TaskName =
  | 'speech'
  | 'face_disgust'
  | 'face_smile'
  | 'face_surprise'
  | 'motor_left'
  | 'motor_right';

export const TASK_ORDER: TaskName[] = [
  'speech',
  'face_disgust',
  'face_smile',
  'face_surprise',
  'motor_left',
  'motor_right',
];

export type Modality = 'speech' | 'face' | 'motor';

export type SeverityBucket = 'none' | 'slight' | 'mild' | 'moderate' | 'severe';

export interface ModalityScore {
  modality: Modality;
  raw_score: number;
  severity_bucket: SeverityBucket;
}

export interface ResourceEntry {
  kind: 'neurologist' | 'support_group' | 'exercise' | 'diet' | 'external';
  title: string;
  region_code: string;
  url?: string;
  contact?: string;
}

export interface RiskReport {
  session_id: string;
  generated_at: string;
  overall_likelihood?: number;
  modality_scores: ModalityScore[];
  not_assessed: string[];
  resources: ResourceEntry[];
  disclaimer: string;
}

export interface ApiErrorBody {
  error: { code: string; detail: string };
}
