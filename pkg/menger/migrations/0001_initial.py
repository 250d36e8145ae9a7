# Generated by Django 6.0 on 2026-10-16 09:12

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='RunManifest',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('created_at', models.DateTimeField(auto_now_add=True)),
                ('command', models.CharField(max_length=64)),
                ('argv', models.JSONField(default=list)),
                ('config', models.JSONField(default=dict)),
                ('inputs', models.JSONField(blank=True, default=dict)),
                ('outputs', models.JSONField(default=dict)),
                ('seed', models.BigIntegerField(blank=True, null=True)),
                ('tool_version', models.CharField(max_length=32)),
                ('versions', models.JSONField(default=dict)),
                ('manifest_path', models.CharField(max_length=1024)),
            ],
            options={
                'verbose_name': 'Run manifest',
                'verbose_name_plural': 'Run manifests',
                'ordering': ['-created_at'],
            },
        ),
    ]
